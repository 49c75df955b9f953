#ifndef SPHDEGEN_PROBLEM_HPP
#define SPHDEGEN_PROBLEM_HPP

#include "sphdegen/fano.hpp"
#include "sphdegen/lie.hpp"
#include "sphdegen/polytope.hpp"
#include "sphdegen/rtc.hpp"
#include "sphdegen/spherical.hpp"
#include "sphdegen/symreal.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace sphdegen::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Parsed problem file: every mathematical object of a run comes from here;
/// flags only carry tolerances and output choices.
struct ProblemFile {
    std::shared_ptr<const lie::RootSystem> root_system;
    spherical::SphericalDatum datum;
    std::optional<polytope::RationalPolytope> poly;  // Delta_L or Delta_+
    RatVec chi0;
    SymBasisPtr basis;
    std::optional<DiscGroup> group;
    std::optional<std::vector<polytope::AffinePiece>> pieces;
    std::optional<SymVec> lambda;
    std::optional<std::vector<rtc::MonoidGenerator>> monoid;
    double tol = 1e-8;
    std::string ref_point = "kappa";
};

ProblemFile parse_problem(const json& j);
ProblemFile load_problem(const std::string& path);

std::string file_digest(const std::string& path);  // fnv1a64 over the raw bytes

rtc::RTestConfig build_config(const ProblemFile& pf);

// serializers
json datum_to_json(const spherical::SphericalDatum& d);
json hreport_to_json(const fano::HReport& r);
json rat_vec_to_json(const RatVec& v);
std::string filtration_csv(const std::vector<rtc::FiltrationRow>& rows, int ambient_dim);

/// Deterministic report envelope; timing is intentionally not part of it.
json make_report(const std::string& command, const std::string& digest, json outputs,
                 std::vector<std::string> warnings);

}  // namespace sphdegen::io

#endif
