#include "adapthash/adapt.hpp"

namespace adapthash {

IdentityPolicy make_identity_policy(IdentityMode mode, unsigned page_bits) {
  IdentityPolicy p;
  p.mode = mode;
  p.hasher.page_bits = page_bits;
  switch (mode) {
    case IdentityMode::Adaptive:
    case IdentityMode::ConstantThenMid:
      p.hasher.kind = HasherKind::Constant;
      break;
    case IdentityMode::MurmurOnly:
      p.hasher.kind = HasherKind::Murmur;
      break;
    case IdentityMode::MidOnly:
      p.hasher.kind = HasherKind::Mid;
      break;
  }
  return p;
}

HasherConfig on_long_chain_identity(IdentityPolicy& p) noexcept {
  if (!p.adaptive()) {
    ++p.ignored_long_chains;
    return p.hasher;
  }
  switch (p.hasher.kind) {
    case HasherKind::PointerShift:
      p.hasher.kind = HasherKind::Mid;
      ++p.escalations;
      break;
    case HasherKind::Mid:
      p.hasher.kind = HasherKind::Murmur;
      ++p.escalations;
      break;
    default:
      // Constant has no chains; Murmur is absorbing.
      ++p.ignored_long_chains;
      break;
  }
  return p.hasher;
}

std::size_t initial_limit(KeyKind kind) noexcept {
  switch (kind) {
    case KeyKind::Sequence:
      return 4;
    case KeyKind::String:
      return 16;
    case KeyKind::Identity:
      break;
  }
  return kNoLimit;
}

StringPolicy make_string_policy(KeyKind kind, bool adaptive) {
  StringPolicy p;
  p.hasher.kind = kind == KeyKind::Sequence ? HasherKind::TruncSequence : HasherKind::TruncString;
  p.initial_limit = adaptive ? initial_limit(kind) : kNoLimit;
  p.hasher.limit = p.initial_limit;
  p.adaptive = adaptive;
  return p;
}

}  // namespace adapthash
