#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>
#include <optional>
#include <string>

#include "adapthash/bench.hpp"
#include "adapthash/hashers.hpp"
#include "adapthash/keygen.hpp"
#include "adapthash/metrics.hpp"
#include "adapthash/table.hpp"

namespace py = pybind11;
using namespace adapthash;

namespace {

py::dict stats_dict(const TableStats& s) {
  py::dict d;
  d["size"] = s.size;
  d["buckets"] = s.buckets;
  d["capacity"] = s.capacity;
  d["hasher"] = std::string(to_string(s.kind));
  d["shift"] = s.shift;
  d["limit"] = s.limit == kNoLimit ? py::object(py::none()) : py::object(py::int_(s.limit));
  d["last_collisions"] = s.last_collisions ? py::object(py::int_(*s.last_collisions)) : py::object(py::none());
  d["max_chain"] = s.max_chain;
  d["constant_phase"] = s.constant_phase;
  d["hash_cache"] = s.hash_cache;
  d["escalations"] = s.escalations;
  d["limit_doublings"] = s.limit_doublings;
  return d;
}

py::tuple report_tuple(const CostReport& r) { return py::make_tuple(r.cost, r.min_cost, r.regret); }

template <class Table, class Key>
void bind_table(py::module_& m, const char* name, std::function<Table(const std::string&)> make) {
  py::class_<Table>(m, name)
      .def(py::init(make), py::arg("mode") = "adaptive")
      .def(
          "put",
          [](Table& t, Key k, py::object v) -> py::object {
            auto old = t.put(std::move(k), std::move(v));
            return old ? *old : py::none();
          },
          py::arg("key"), py::arg("value"), "Insert or replace; returns the previous value or None.")
      .def(
          "get",
          [](const Table& t, const Key& k, py::object fallback) -> py::object {
            const py::object* v = t.get(k);
            return v ? *v : fallback;
          },
          py::arg("key"), py::arg("default") = py::none())
      .def("erase", [](Table& t, const Key& k) { return t.erase(k); })
      .def("__len__", &Table::size)
      .def("__contains__", [](const Table& t, const Key& k) { return t.contains(k); })
      .def("__getitem__",
           [](const Table& t, const Key& k) -> py::object {
             const py::object* v = t.get(k);
             if (!v) throw py::key_error(py::repr(py::cast(k)));
             return *v;
           })
      .def("__setitem__", [](Table& t, Key k, py::object v) { t.put(std::move(k), std::move(v)); })
      .def("__delitem__",
           [](Table& t, const Key& k) {
             if (!t.erase(k)) throw py::key_error(py::repr(py::cast(k)));
           })
      .def("items",
           [](const Table& t) {
             py::list out;
             for (const auto& e : t) out.append(py::make_tuple(e.key, e.value));
             return out;
           })
      .def("keys",
           [](const Table& t) {
             py::list out;
             for (const auto& e : t) out.append(py::cast(e.key));
             return out;
           })
      .def("stats", [](const Table& t) { return stats_dict(t.stats()); })
      .def("regret", [](const Table& t) { return report_tuple(t.regret()); },
           "(cost, min_cost, regret) of the current bucket occupancy.")
      .def("check_invariants", &Table::check_invariants);
}

using PyIdentityTable = IdentityTable<py::object>;
using PyStringTable = StringTable<py::object>;

template <class T>
py::tuple keyset_tuple(const KeySet<T>& ks) {
  return py::make_tuple(ks.keys, ks.miss_keys);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive hash tables, the collision cost model and workload generators";

  m.def("min_cost", &min_cost, py::arg("n"), py::arg("m"));
  m.def("expected_uniform_cost", &expected_uniform_cost, py::arg("n"), py::arg("m"));
  m.def("expected_uniform_regret", &expected_uniform_regret, py::arg("m"));
  m.def("uniform_reference_regret", &uniform_reference_regret, py::arg("n"), py::arg("m"));
  m.def("expected_pointer_mix_cost", &expected_pointer_mix_cost, py::arg("n"), py::arg("keys_per_page"),
        py::arg("m"), py::arg("page_bits") = kDefaultPageBits, py::arg("shift") = 0);
  m.def("expected_empty_buckets", &expected_empty_buckets, py::arg("n"), py::arg("m"));
  m.def("too_many_collisions", &too_many_collisions, py::arg("n"), py::arg("m"), py::arg("collisions"));
  m.def(
      "max_chain_threshold",
      [](std::uint64_t buckets, const std::string& policy) {
        if (policy == "identity") return max_chain_threshold(buckets, ChainPolicy::Identity);
        if (policy == "string") return max_chain_threshold(buckets, ChainPolicy::String);
        throw py::value_error("policy must be 'identity' or 'string'");
      },
      py::arg("m"), py::arg("policy") = "identity");
  m.def(
      "bucket_counts",
      [](const std::vector<HashValue>& hashes, std::uint64_t buckets) { return bucket_counts(hashes, buckets).counts; },
      py::arg("hashes"), py::arg("m"));
  m.def(
      "regret",
      [](const std::vector<HashValue>& hashes, std::uint64_t buckets) {
        return report_tuple(regret(std::span<const HashValue>(hashes), buckets));
      },
      py::arg("hashes"), py::arg("m"), "(cost, min_cost, regret) for hashes placed into m buckets.");

  m.def("murmur_mix", &murmur_mix);
  m.def("mid_hash", &mid_hash);
  m.def("pointer_shift_hash", &pointer_shift_hash, py::arg("k"), py::arg("shift"),
        py::arg("page_bits") = kDefaultPageBits);
  m.def("pointer_mix_hash", &pointer_mix_hash, py::arg("k"), py::arg("shift"),
        py::arg("page_bits") = kDefaultPageBits);
  m.def(
      "count_common_low_bits", [](const std::vector<std::uint64_t>& keys) { return count_common_low_bits(keys); },
      py::arg("keys"));
  m.def(
      "hash_string",
      [](const std::string& s, std::optional<std::size_t> limit) {
        return hash_string_limited(s, limit.value_or(kNoLimit));
      },
      py::arg("s"), py::arg("limit") = py::none());
  m.def("is_truncated", &is_truncated);

  bind_table<PyIdentityTable, std::uint64_t>(m, "IdentityTable", [](const std::string& mode) {
    return PyIdentityTable(make_identity_policy(identity_mode(parse_mode(mode))));
  });
  bind_table<PyStringTable, std::string>(m, "StringTable", [](const std::string& mode) {
    return PyStringTable(make_string_policy(KeyKind::String, parse_mode(mode) == HasherMode::Adaptive));
  });

  m.def("gen_prog", [](std::size_t n, std::uint64_t d, std::uint64_t seed) { return keyset_tuple(gen_prog(n, d, seed)); },
        py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def(
      "gen_rnd_prog",
      [](std::size_t n, std::uint64_t k, std::uint64_t seed) { return keyset_tuple(gen_rnd_prog(n, k, seed)); },
      py::arg("n"), py::arg("max_skip"), py::arg("seed"));
  m.def("gen_float_bits", [](std::size_t n, std::uint64_t seed) { return keyset_tuple(gen_float_bits(n, seed)); },
        py::arg("n"), py::arg("seed"));
  m.def(
      "gen_paged",
      [](std::size_t n, unsigned pb, std::uint64_t stride, double occ, std::uint64_t seed, std::size_t pages) {
        return keyset_tuple(gen_paged(n, pb, stride, occ, seed, pages));
      },
      py::arg("n"), py::arg("page_bits"), py::arg("object_stride"), py::arg("occupancy"), py::arg("seed"),
      py::arg("pages") = 0);
  m.def("gen_strings_random",
        [](std::size_t n, std::uint64_t seed) { return keyset_tuple(gen_strings_random(n, seed)); }, py::arg("n"),
        py::arg("seed"));
  m.def("gen_shared_affix", [](std::size_t n, std::uint64_t seed) { return keyset_tuple(gen_shared_affix(n, seed)); },
        py::arg("n"), py::arg("seed"));

  m.def(
      "plan_segments",
      [](std::size_t max_n) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const Segment& s : plan_segments(max_n)) out.emplace_back(s.min_keys, s.max_keys);
        return out;
      },
      py::arg("max_n"));
  m.def(
      "run_regret",
      [](const std::string& workload, const std::string& mode, const std::vector<std::size_t>& sizes,
         std::uint64_t seed) {
        py::list out;
        for (const RegretPoint& p : run_regret(parse_workload(workload), parse_mode(mode), sizes, seed)) {
          py::dict d;
          d["nkeys"] = p.nkeys;
          d["regret"] = p.regret;
          d["rndregret"] = p.rndregret;
          d["hasher"] = std::string(to_string(p.kind));
          d["shift"] = p.shift;
          d["limit"] = p.limit == kNoLimit ? py::object(py::none()) : py::object(py::int_(p.limit));
          d["buckets"] = p.buckets;
          out.append(d);
        }
        return out;
      },
      py::arg("workload"), py::arg("mode"), py::arg("sizes"), py::arg("seed"));
}
