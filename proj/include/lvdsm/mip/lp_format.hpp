#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>

#include "lvdsm/mip/problem.hpp"

namespace lvdsm::mip {

// CPLEX-style LP text. Ranged rows become two rows suffixed _lo and _hi.
void write_lp(const Problem& problem, std::ostream& out);
void write_lp_file(const Problem& problem, const std::string& path);

// Name under which a variable or row appears in the LP text.
std::string lp_identifier(const std::string& raw);

// Reads "name value" pairs, one per line; lines starting with '#' and blank
// lines are skipped. Accepts the .sol files most solvers write.
std::unordered_map<std::string, double> read_solution(std::istream& in);
std::unordered_map<std::string, double> read_solution_file(const std::string& path);

}  // namespace lvdsm::mip
