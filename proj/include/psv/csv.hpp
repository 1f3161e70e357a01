#ifndef PSV_CSV_HPP
#define PSV_CSV_HPP

#include <ostream>
#include <string>

#include "psv/chain.hpp"
#include "psv/diagnostics.hpp"

namespace psv {

/// Scientific notation, lowercase `e`, 11 significant digits; `nan`/`inf`
/// for non-finite values. Locale independent.
std::string format_real(double value);

/// `method,n_total,p_mean,delta,big_delta,acceptance_rate`; the analytic
/// row comes first with empty n_total, delta, big_delta and acceptance.
void write_bench_csv(std::ostream& out, const BenchmarkResult& result);

/// `index,x,accepted`, one row per chain step including burn-in.
void write_chain_csv(std::ostream& out, const Chain& chain);

/// `x,h_kde,analytic_density`.
void write_profile_csv(std::ostream& out, const ConvergenceProfile& profile);

}  // namespace psv

#endif  // PSV_CSV_HPP
