#include "psv/csv.hpp"

#include <cmath>
#include <fmt/format.h>

namespace psv {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.10e}", value);
}

void write_bench_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "method,n_total,p_mean,delta,big_delta,acceptance_rate\n";
  if (result.analytic) out << "analytic,," << format_real(*result.analytic) << ",,,\n";
  for (const auto& r : result.reports) {
    out << r.method << ',' << r.n_total << ',';
    if (r.error) {
      out << ",,,\n";
      continue;
    }
    out << format_real(r.p_mean) << ',';
    if (r.degenerate) {
      out << ",,";
    } else {
      out << format_real(r.delta) << ',' << format_real(r.big_delta) << ',';
    }
    if (r.acceptance_rate) out << format_real(*r.acceptance_rate);
    out << '\n';
  }
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
  out << "index,x,accepted\n";
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    out << i << ',' << format_real(chain.samples[i]) << ',' << int{chain.accepted[i]} << '\n';
  }
}

void write_profile_csv(std::ostream& out, const ConvergenceProfile& profile) {
  out << "x,h_kde,analytic_density\n";
  for (const auto& row : profile.rows) {
    out << format_real(row.x) << ',' << format_real(row.empirical) << ','
        << format_real(row.analytic) << '\n';
  }
}

}  // namespace psv
