// adapthash: benchmark, regret sweep, bound table and key export.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adapthash/bench.hpp"
#include "adapthash/keygen.hpp"

namespace {

using namespace adapthash;

// "-" writes to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out;
}

void render(std::ostream& out, const Sequence& seq);

void render(std::ostream& out, const SeqItem& item) {
  if (const auto* w = std::get_if<std::uint64_t>(&item.value)) {
    out << *w;
  } else if (const auto* s = std::get_if<std::string>(&item.value)) {
    out << '"' << escape(*s) << '"';
  } else {
    render(out, std::get<Sequence>(item.value));
  }
}

void render(std::ostream& out, const Sequence& seq) {
  out << '(';
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out << ' ';
    render(out, seq[i]);
  }
  out << ')';
}

template <class Key, class Write>
void write_keyset(std::ostream& out, const KeySet<Key>& ks, Write&& write) {
  out << "set\tkey\n";
  for (const auto& k : ks.keys) {
    out << "put\t";
    write(k);
    out << '\n';
  }
  for (const auto& k : ks.miss_keys) {
    out << "miss\t";
    write(k);
    out << '\n';
  }
}

std::vector<std::size_t> regret_sizes(std::size_t max_n, const std::vector<std::size_t>& explicit_sizes) {
  if (!explicit_sizes.empty()) return explicit_sizes;
  return measurement_points(plan_segments(max_n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive hash table benchmarks and analysis"};
  app.require_subcommand(1);

  std::string workload;
  std::string mode = "adaptive";
  std::size_t max_n = 0;
  std::uint64_t seed = 1;
  std::string out_path = "-";

  auto* bench = app.add_subcommand("bench", "Time PUT/GET/MISS/DEL at every resize-segment endpoint");
  std::uint64_t budget_ops = kDefaultBudgetOps;
  std::size_t min_reps = 3;
  bool no_warmup = false;
  bench->add_option("--workload", workload, "prog:D | rnd:K | float | paged[:stride[:occ[:pb]]] | adversarial | "
                                            "strings:<file|random|shared-affix> | sequences")
      ->required();
  bench->add_option("--mode", mode, "adaptive | murmur | mid | co-mid")->capture_default_str();
  bench->add_option("--max-n", max_n, "Largest key count")->required()->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "Workload seed")->capture_default_str();
  bench->add_option("--budget-ops", budget_ops, "Operation floor per measurement")->capture_default_str();
  bench->add_option("--min-reps", min_reps, "Repetition floor per measurement")->capture_default_str();
  bench->add_flag("--no-warmup", no_warmup, "Skip the untimed warm-up pass");
  bench->add_option("--out", out_path, "Output TSV path ('-' for stdout)")->required();

  auto* regret = app.add_subcommand("regret", "Regret against the uniform reference, no timing");
  std::vector<std::size_t> sizes;
  regret->add_option("--workload", workload, "Workload selector (as for bench)")->required();
  regret->add_option("--mode", mode, "adaptive | murmur | mid | co-mid")->capture_default_str();
  regret->add_option("--max-n", max_n, "Largest key count (segment endpoints)")->check(CLI::PositiveNumber);
  regret->add_option("--sizes", sizes, "Explicit key counts instead of segment endpoints")->delimiter(',');
  regret->add_option("--seed", seed, "Workload seed")->capture_default_str();
  regret->add_option("--out", out_path, "Output TSV path ('-' for stdout)")->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "Empty-bucket proportion and its bounds over f in [0, 1]");
  std::size_t f_steps = 0;
  std::vector<std::uint64_t> m_list{8, 16};
  bounds->add_option("--f-steps", f_steps, "Grid intervals")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--m", m_list, "Bucket counts for the exact column")->delimiter(',')->capture_default_str();
  bounds->add_option("--out", out_path, "Output TSV path ('-' for stdout)")->capture_default_str();

  auto* keygen = app.add_subcommand("keygen", "Export a generated key set");
  std::size_t n = 0;
  keygen->add_option("--spec", workload, "Workload selector (as for bench)")->required();
  keygen->add_option("--n", n, "Key count")->required()->check(CLI::PositiveNumber);
  keygen->add_option("--seed", seed, "Workload seed")->capture_default_str();
  keygen->add_option("--out", out_path, "Output TSV path ('-' for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (bench->parsed()) {
      const WorkloadSpec spec = parse_workload(workload);
      const HasherMode hm = parse_mode(mode);
      BenchOptions opt;
      opt.budget_ops = budget_ops;
      opt.min_reps = min_reps;
      opt.warmup = !no_warmup;
      const auto records = run_bench(spec, hm, max_n, seed, opt);
      TsvOptions tsv;
      tsv.budget_ops = budget_ops;
      tsv.comments = {"workload=" + describe(spec), "mode=" + std::string(to_string(hm)),
                      "seed=" + std::to_string(seed), "clock-resolution-ns=" + std::to_string(clock_resolution_ns()),
                      std::string("warmup=") + (opt.warmup ? "yes" : "no")};
      Output out(out_path);
      emit_tsv(records, out.stream(), tsv);
    } else if (regret->parsed()) {
      if (sizes.empty() && max_n == 0) throw std::invalid_argument("regret needs --max-n or --sizes");
      const WorkloadSpec spec = parse_workload(workload);
      const auto points = run_regret(spec, parse_mode(mode), regret_sizes(max_n, sizes), seed);
      Output out(out_path);
      emit_regret_tsv(points, out.stream());
    } else if (bounds->parsed()) {
      const auto rows = bounds_table(m_list, f_steps);
      Output out(out_path);
      emit_bounds_tsv(rows, m_list, out.stream());
    } else if (keygen->parsed()) {
      const WorkloadSpec spec = parse_workload(workload);
      std::ostringstream buf;
      if (is_word_workload(spec.kind)) {
        write_keyset(buf, generate_words(spec, n, seed), [&](std::uint64_t k) { buf << k; });
      } else if (is_sequence_workload(spec.kind)) {
        write_keyset(buf, generate_sequences(spec, n, seed), [&](const Sequence& k) { render(buf, k); });
      } else {
        write_keyset(buf, generate_strings(spec, n, seed), [&](const std::string& k) { buf << escape(k); });
      }
      Output out(out_path);
      out.stream() << buf.str();
      if (!out.stream()) throw std::runtime_error("failed writing key set");
    }
  } catch (const std::exception& e) {
    std::cerr << "adapthash: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
