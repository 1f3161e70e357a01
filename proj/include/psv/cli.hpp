#ifndef PSV_CLI_HPP
#define PSV_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace psv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int table = 1;
};

int cmd_estimate(const Options& options, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& options, std::ostream& out, std::ostream& err);
int cmd_sample(const Options& options, std::ostream& out, std::ostream& err);
int cmd_diag(const Options& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psv::cli

#endif  // PSV_CLI_HPP
