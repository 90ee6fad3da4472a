#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wbary/cluster.hpp"
#include "wbary/model.hpp"

namespace wbary {

// Distribution files ("WBD1"):
//
//   WBD1
//   <N> <d>
//   <n_1>
//   <b_1> <a_1,1> ... <a_1,d>
//   ...
//
// Numbers are written with 17 significant digits so a parse/serialize cycle
// reproduces every value exactly. Blank lines are ignored when reading.

/// Parses and validates a distribution file. Weights within 1e-12 of summing
/// to one are renormalized; zero weights are dropped with a warning. Errors
/// are ParseError with the offending line number.
std::vector<DiscreteDistribution> parse_distributions(std::istream& in);
std::vector<DiscreteDistribution> read_distributions(const std::string& path);

void write_distributions(std::ostream& out, const std::vector<DiscreteDistribution>& data);
void write_distributions(const std::string& path, const std::vector<DiscreteDistribution>& data);

/// Writes (w, x) as a single-distribution WBD1 file, zero weights included.
void write_barycenter(const std::string& path, const Vector& w, const Matrix& x);

/// Report files are JSON objects with keys in a fixed order: method, objval,
/// pinfeas, outer_iterations, inner_iterations, wall_time_s, m, seed,
/// converged, config. `extra` members (e.g. the barycenter) follow.
std::string report_to_json(const SolveReport& report, const Vector* w = nullptr,
                           const Matrix* x = nullptr);
void write_report(const SolveReport& report, const std::string& path, const Vector* w = nullptr,
                  const Matrix* x = nullptr);
/// Throws ParseError if a key is missing or has the wrong type.
SolveReport parse_report(const std::string& json_text);
SolveReport read_report(const std::string& path);

/// Cluster model as JSON (0-based assignments).
void write_cluster_model(const ClusterModel& model, const ClusterConfig& config,
                         const std::string& path);

/// Whitespace-separated numbers: a vector of any length, or a matrix with a
/// fixed number of columns per line.
Vector read_vector(const std::string& path);
Matrix read_matrix(const std::string& path);
void write_vector(const std::string& path, const Vector& v);
void write_matrix(const std::string& path, const Matrix& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace wbary
