#include "wbary/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "wbary/badmm.hpp"
#include "wbary/cluster.hpp"
#include "wbary/datagen.hpp"
#include "wbary/errors.hpp"
#include "wbary/io.hpp"
#include "wbary/pam.hpp"
#include "wbary/parallel.hpp"
#include "wbary/transport.hpp"

namespace wbary {
namespace {

constexpr long kPamMaxIter = 100;
constexpr long kBadmmMaxIter = 2000;

struct GenArgs {
  std::string family = "mvn-t";
  Index n = 20;
  Index d = 2;
  std::string nt = "10";
  std::uint64_t seed = 0;
  std::string output;
};

struct SolveArgs {
  std::string method = "pam";
  Index m = 0;
  std::string input;
  std::uint64_t seed = 0;
  double pinf_tol = 1e-4;
  long max_iter = 0;  // 0 selects the per-method default
  std::string output;
  std::string barycenter;
  std::string w_out;
  std::string x_out;
};

struct DistanceArgs {
  std::string a;
  std::string b;
};

struct ClusterArgs {
  Index k = 2;
  Index m = 0;  // 0: rounded mean support size
  std::string input;
  std::uint64_t seed = 0;
  long max_rounds = 10;
  std::string output;
};

struct BenchArgs {
  std::string methods = "pam,badmm";
  std::string input;
  std::string m = "10";
  std::uint64_t seed = 0;
  double pinf_tol = 1e-4;
  std::string output;
};

struct EvalArgs {
  std::string input;
  std::string w;
  std::string x;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double mean_support(const std::vector<DiscreteDistribution>& data) {
  double total = 0.0;
  for (const auto& p : data) total += static_cast<double>(p.size());
  return total / static_cast<double>(data.size());
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

struct Solved {
  BarycenterState state;
  SolveReport report;
};

Solved run_method(const std::string& method, const BarycenterProblem& problem, std::uint64_t seed,
                  double pinf_tol, long max_iter, const BarycenterState& init) {
  if (method == "pam") {
    PamConfig config;
    config.seed = seed;
    config.pinf_tol = pinf_tol;
    config.k_max = max_iter > 0 ? max_iter : kPamMaxIter;
    PamResult r = solve_barycenter(problem, config, init);
    return {std::move(r.state), std::move(r.report)};
  }
  if (method == "badmm") {
    BadmmConfig config;
    config.seed = seed;
    config.pinf_tol = pinf_tol;
    config.k_max = max_iter > 0 ? max_iter : kBadmmMaxIter;
    BadmmResult r = solve_badmm(problem, config, init);
    return {std::move(r.state), std::move(r.report)};
  }
  throw InvalidArgument("unknown method '" + method + "' (expected pam or badmm)");
}

void cmd_gen(const GenArgs& a, std::ostream& out) {
  GenSpec spec;
  spec.family = parse_family(a.family);
  spec.count = a.n;
  spec.dim = a.d;
  spec.seed = a.seed;
  if (spec.family == Family::kVariedNt) {
    spec.nt_grid = parse_grid(a.nt);
  } else {
    const auto grid = parse_grid(a.nt);
    if (grid.size() != 1) throw InvalidArgument("--nt takes a single value for this family");
    spec.nt = grid.front();
  }
  std::ostringstream text;
  write_distributions(text, generate(spec));
  emit(a.output, text.str(), out);
}

void cmd_solve(const SolveArgs& a, std::ostream& out) {
  BarycenterProblem problem(read_distributions(a.input), a.m);
  const BarycenterState init = init_state(problem, a.seed);
  Solved s = run_method(a.method, problem, a.seed, a.pinf_tol, a.max_iter, init);
  emit(a.output, report_to_json(s.report, &s.state.w, &s.state.x), out);
  if (!a.barycenter.empty()) write_barycenter(a.barycenter, s.state.w, s.state.x);
  if (!a.w_out.empty()) write_vector(a.w_out, s.state.w);
  if (!a.x_out.empty()) write_matrix(a.x_out, s.state.x);
}

void cmd_distance(const DistanceArgs& a, std::ostream& out) {
  const auto lhs = read_distributions(a.a);
  const auto rhs = read_distributions(a.b);
  if (lhs.size() != rhs.size()) {
    throw InvalidArgument("files hold different numbers of distributions");
  }
  for (std::size_t t = 0; t < lhs.size(); ++t) {
    out << format_double(w2_distance(lhs[t], rhs[t])) << '\n';
  }
}

void cmd_cluster(const ClusterArgs& a, std::ostream& out) {
  const auto data = read_distributions(a.input);
  ClusterConfig config;
  config.k = a.k;
  config.m = a.m > 0 ? a.m : std::max<Index>(1, std::llround(mean_support(data)));
  config.max_rounds = a.max_rounds;
  config.seed = a.seed;
  const ClusterModel model = d2_cluster(data, config);
  if (a.output.empty() || a.output == "-") {
    for (Index l : model.assignments) out << l << '\n';
  } else {
    write_cluster_model(model, config, a.output);
  }
}

void cmd_bench(const BenchArgs& a, std::ostream& out) {
  const auto data = read_distributions(a.input);
  const auto methods = split_list(a.methods);
  const auto sizes = parse_grid(a.m);
  if (methods.empty()) throw InvalidArgument("--methods is empty");
  std::ostringstream csv;
  csv << "method,N,m,mean_nt,time_s,objval,pinfeas,iters\n";
  for (Index m : sizes) {
    BarycenterProblem problem(data, m);
    // Every method starts from the same point.
    const BarycenterState init = init_state(problem, a.seed);
    for (const auto& method : methods) {
      const Solved s = run_method(method, problem, a.seed, a.pinf_tol, 0, init);
      csv << method << ',' << data.size() << ',' << m << ',' << format_double(mean_support(data))
          << ',' << format_double(s.report.wall_time_s) << ',' << format_double(s.report.objval)
          << ',' << format_double(s.report.pinfeas) << ',' << s.report.outer_iterations << '\n';
    }
  }
  emit(a.output, csv.str(), out);
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto data = read_distributions(a.input);
  const Vector w = read_vector(a.w);
  const Matrix x = read_matrix(a.x);
  if (w.size() != x.rows()) throw InvalidArgument("w and x disagree in support size");
  BarycenterProblem problem(data, w.size());
  out << format_double(evaluate_objval(w, x, problem)) << '\n';
}

class ThreadScope {
 public:
  explicit ThreadScope(int n) : saved_(num_threads()) { set_num_threads(n); }
  ~ThreadScope() { set_num_threads(saved_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int saved_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free-support Wasserstein barycenters and D2-clustering", "wbary"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset");
  g->add_option("--family", gen.family, "mvn-t, colors or varied-nt")->capture_default_str();
  g->add_option("--n", gen.n, "Number of distributions")->capture_default_str();
  g->add_option("--d", gen.d, "Dimension")->capture_default_str();
  g->add_option("--nt", gen.nt, "Support size, or a grid a:s:b / a,b,c for varied-nt")
      ->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("-o,--output", gen.output, "Output file (default stdout)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Compute a barycenter");
  s->add_option("--method", solve.method)
      ->check(CLI::IsMember({"pam", "badmm"}))
      ->capture_default_str();
  s->add_option("--m", solve.m, "Barycenter support size")->required()->check(CLI::PositiveNumber);
  s->add_option("--input", solve.input)->required();
  s->add_option("--seed", solve.seed)->capture_default_str();
  s->add_option("--pinf-tol", solve.pinf_tol)->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "Iteration cap (default 100 for pam, 2000 for badmm)");
  s->add_option("-o,--output", solve.output, "Report file (default stdout)");
  s->add_option("--barycenter", solve.barycenter, "Also write (w, x) as a distribution file");
  s->add_option("--w-out", solve.w_out, "Also write w as plain text");
  s->add_option("--x-out", solve.x_out, "Also write x as plain text");

  DistanceArgs dist;
  auto* d = app.add_subcommand("distance", "Print W_2 between matching distributions of two files");
  d->add_option("a", dist.a)->required();
  d->add_option("b", dist.b)->required();

  ClusterArgs cl;
  auto* c = app.add_subcommand("cluster", "D2-clustering");
  c->add_option("--k", cl.k)->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--input", cl.input)->required();
  c->add_option("--seed", cl.seed)->capture_default_str();
  c->add_option("--m", cl.m, "Centroid support size (default: rounded mean n_t)");
  c->add_option("--max-rounds", cl.max_rounds)->capture_default_str();
  c->add_option("-o,--output", cl.output, "Model file (default: assignments on stdout)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run solvers from a shared start and emit CSV");
  b->add_option("--methods", bench.methods)->capture_default_str();
  b->add_option("--input", bench.input)->required();
  b->add_option("--m", bench.m, "Support sizes: a:s:b or a,b,c")->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--pinf-tol", bench.pinf_tol)->capture_default_str();
  b->add_option("-o,--output", bench.output, "CSV file (default stdout)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Exact objective of a given barycenter");
  e->add_option("--input", ev.input)->required();
  e->add_option("--w", ev.w, "Weights, whitespace separated")->required();
  e->add_option("--x", ev.x, "Support points, one per line")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    ThreadScope scope(threads);
    if (g->parsed()) cmd_gen(gen, out);
    if (s->parsed()) cmd_solve(solve, out);
    if (d->parsed()) cmd_distance(dist, out);
    if (c->parsed()) cmd_cluster(cl, out);
    if (b->parsed()) cmd_bench(bench, out);
    if (e->parsed()) cmd_eval(ev, out);
  } catch (const NumericalError& ex) {
    err << "wbary: numerical failure: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "wbary: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace wbary
