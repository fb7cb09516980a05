#ifndef DYM_PERIODIC_HPP
#define DYM_PERIODIC_HPP

#include <string>
#include <vector>

#include "dym/constant_rho.hpp"

namespace dym {

enum class PeriodicBranch { delta0, deltapos_drift, deltapos_bounded };
const char* to_string(PeriodicBranch b);
PeriodicBranch parse_periodic_branch(const std::string& name);

struct ScanOptions {
    PeriodicBranch branch = PeriodicBranch::delta0;
    double lambda = 1;
    double rho_lo = 0.02, rho_hi = 0.3;
    int rho_grid = 24;
    double P_lo = 0.1, P_hi = 3;  // deltapos only
    int P_grid = 8;
    std::int64_t qmax = 64;
    int max_candidates = 4;
    double delta0 = 1, argc0 = 0;  // deltapos data
    Complex c0{1, 0};              // delta0 data
};

struct ScanPoint {
    double rho0 = 0, P0 = NAN;
    double f = NAN, f2 = NAN, T = NAN;
};

struct PeriodicReport {
    std::vector<ScanPoint> grid;
    std::vector<PeriodicCandidate> candidates;
    std::vector<std::string> notes;
};

// Coarse scan, continued-fraction targets with q <= qmax, then root finding (Brent for
// delta0, damped Newton in (rho0, P0) for deltapos). Deterministic for fixed options.
PeriodicReport find_periodic(const ScanOptions& opt);

// Full-field closure over the minimal period for a deltapos candidate.
double closure_deltapos(double lambda, double rho0, double P0, double T, std::int64_t periods, double delta0,
                        double argc0);

}  // namespace dym

#endif
