#include "wbary/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "wbary/errors.hpp"
#include "wbary/log.hpp"

namespace wbary {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kMagic = "WBD1";

// Line reader that skips blank lines and remembers the current line number.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> expect(const char* what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) throw ParseError(line_ + 1, std::string("unexpected end of file, expected ") + what);
    return tokens;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

double to_double(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError(line, "not a finite number: '" + tok + "'");
  return v;
}

Index to_count(const std::string& tok, std::size_t line, const char* what) {
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 1) {
    throw ParseError(line, std::string(what) + " must be a positive integer, got '" + tok + "'");
  }
  return static_cast<Index>(v);
}

void write_number(std::ostream& out, double v) { out << format_double(v); }

void write_block(std::ostream& out, const Vector& w, const Matrix& x) {
  out << w.size() << '\n';
  for (Index j = 0; j < w.size(); ++j) {
    write_number(out, w[j]);
    for (Index c = 0; c < x.cols(); ++c) {
      out << ' ';
      write_number(out, x(j, c));
    }
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(0, std::string("report is missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(0, std::string("report key '") + key + "' has the wrong type");
  }
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace

std::vector<DiscreteDistribution> parse_distributions(std::istream& in) {
  LineReader reader(in);
  auto tokens = reader.expect("magic");
  if (tokens.size() != 1 || tokens[0] != kMagic) {
    throw ParseError(reader.line(), "bad magic, expected 'WBD1'");
  }
  tokens = reader.expect("header 'N d'");
  if (tokens.size() != 2) throw ParseError(reader.line(), "header must hold N and d");
  const Index count = to_count(tokens[0], reader.line(), "N");
  const Index dim = to_count(tokens[1], reader.line(), "d");

  std::vector<DiscreteDistribution> out;
  out.reserve(count);
  for (Index t = 0; t < count; ++t) {
    tokens = reader.expect("support size");
    if (tokens.size() != 1) throw ParseError(reader.line(), "support-size line must hold one integer");
    const std::size_t header_line = reader.line();
    const Index nt = to_count(tokens[0], header_line, "n_t");

    Matrix support(nt, dim);
    Vector weights(nt);
    std::vector<std::size_t> lines(nt);
    for (Index j = 0; j < nt; ++j) {
      tokens = reader.expect("support point");
      lines[j] = reader.line();
      if (static_cast<Index>(tokens.size()) != dim + 1) {
        throw ParseError(reader.line(), "expected weight and " + std::to_string(dim) +
                                            " coordinates, got " + std::to_string(tokens.size()) +
                                            " fields");
      }
      weights[j] = to_double(tokens[0], reader.line());
      if (weights[j] < -kWeightSumTolerance) {
        throw ParseError(reader.line(), "negative weight " + tokens[0]);
      }
      if (weights[j] < 0.0) weights[j] = 0.0;
      for (Index c = 0; c < dim; ++c) support(j, c) = to_double(tokens[c + 1], reader.line());
    }

    const double total = weights.sum();
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
      throw ParseError(header_line, "weights of distribution " + std::to_string(t + 1) + " sum to " +
                                        format_double(total));
    }
    const Index kept = (weights.array() > 0.0).count();
    if (kept == 0) throw ParseError(header_line, "distribution has no positive weight");
    if (kept < nt) {
      Matrix s(kept, dim);
      Vector w(kept);
      for (Index j = 0, o = 0; j < nt; ++j) {
        if (weights[j] > 0.0) {
          s.row(o) = support.row(j);
          w[o++] = weights[j];
        } else {
          warn("line " + std::to_string(lines[j]) + ": dropping zero-weight support point");
        }
      }
      support = std::move(s);
      weights = std::move(w);
    }
    try {
      out.emplace_back(std::move(support), std::move(weights));
    } catch (const InvalidArgument& e) {
      throw ParseError(header_line, e.what());
    }
  }
  if (reader.next(tokens)) throw ParseError(reader.line(), "trailing content after the last distribution");
  return out;
}

std::vector<DiscreteDistribution> read_distributions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return parse_distributions(in);
}

void write_distributions(std::ostream& out, const std::vector<DiscreteDistribution>& data) {
  if (data.empty()) throw InvalidArgument("nothing to write: no distributions");
  const Index dim = data.front().dim();
  out << kMagic << '\n' << data.size() << ' ' << dim << '\n';
  for (const auto& p : data) {
    if (p.dim() != dim) throw InvalidArgument("distributions differ in dimension");
    write_block(out, p.weights(), p.support());
  }
}

void write_distributions(const std::string& path, const std::vector<DiscreteDistribution>& data) {
  auto out = open_out(path);
  write_distributions(out, data);
  finish(out, path);
}

void write_barycenter(const std::string& path, const Vector& w, const Matrix& x) {
  if (w.size() != x.rows()) throw InvalidArgument("barycenter weights and support disagree in size");
  auto out = open_out(path);
  out << kMagic << '\n' << 1 << ' ' << x.cols() << '\n';
  write_block(out, w, x);
  finish(out, path);
}

std::string report_to_json(const SolveReport& report, const Vector* w, const Matrix* x) {
  Json j;
  j["method"] = report.method;
  j["objval"] = report.objval;
  j["pinfeas"] = report.pinfeas;
  j["outer_iterations"] = report.outer_iterations;
  j["inner_iterations"] = report.inner_iterations;
  j["wall_time_s"] = report.wall_time_s;
  j["m"] = report.m;
  j["seed"] = report.seed;
  j["converged"] = report.converged;
  Json config = Json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  j["config"] = std::move(config);
  if (w && x) j["barycenter"] = {{"w", vector_json(*w)}, {"x", matrix_json(*x)}};
  // nlohmann prints doubles with 17 significant digits, enough to round-trip.
  return j.dump(2) + "\n";
}

void write_report(const SolveReport& report, const std::string& path, const Vector* w,
                  const Matrix* x) {
  write_file(path, report_to_json(report, w, x));
}

SolveReport parse_report(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(0, "report must be a JSON object");
  SolveReport r;
  r.method = get_field<std::string>(j, "method");
  r.objval = get_field<double>(j, "objval");
  r.pinfeas = get_field<double>(j, "pinfeas");
  r.outer_iterations = get_field<long>(j, "outer_iterations");
  r.inner_iterations = get_field<long>(j, "inner_iterations");
  r.wall_time_s = get_field<double>(j, "wall_time_s");
  r.m = get_field<Index>(j, "m");
  r.seed = get_field<std::uint64_t>(j, "seed");
  r.converged = get_field<bool>(j, "converged");
  r.config = get_field<std::map<std::string, std::string>>(j, "config");
  return r;
}

SolveReport read_report(const std::string& path) { return parse_report(read_file(path)); }

void write_cluster_model(const ClusterModel& model, const ClusterConfig& config,
                         const std::string& path) {
  Json j;
  j["k"] = config.k;
  j["m"] = config.m;
  j["seed"] = config.seed;
  j["objective"] = model.objective;
  j["rounds"] = model.rounds;
  j["converged"] = model.converged;
  j["assignments"] = model.assignments;
  j["distances"] = model.distances;
  Json centroids = Json::array();
  for (const auto& c : model.centroids) {
    centroids.push_back({{"weights", vector_json(c.weights)}, {"support", matrix_json(c.support)}});
  }
  j["centroids"] = std::move(centroids);
  write_file(path, j.dump(2) + "\n");
}

Vector read_vector(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::size_t line = 0;
  for (std::string text; std::getline(in, text);) {
    ++line;
    std::istringstream ss(text);
    for (std::string tok; ss >> tok;) values.push_back(to_double(tok, line));
  }
  if (values.empty()) throw ParseError(line, "'" + path + "' holds no numbers");
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix read_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::size_t line = 0;
  for (std::string text; std::getline(in, text);) {
    ++line;
    std::istringstream ss(text);
    std::vector<double> row;
    for (std::string tok; ss >> tok;) row.push_back(to_double(tok, line));
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line, "expected " + std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line, "'" + path + "' holds no numbers");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) m(i, c) = rows[i][c];
  }
  return m;
}

void write_vector(const std::string& path, const Vector& v) {
  std::ostringstream out;
  for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  write_file(path, out.str());
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ostringstream out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_double(m(i, c));
    out << '\n';
  }
  write_file(path, out.str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& contents) {
  auto out = open_out(path);
  out << contents;
  finish(out, path);
}

}  // namespace wbary
