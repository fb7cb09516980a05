#ifndef DYM_CLI_HPP
#define DYM_CLI_HPP

#include <iosfwd>
#include <string_view>

#include "dym/algebra.hpp"

namespace dym {

// Exit codes: 0 success, 1 usage, 2 blow-up / singularity / failed verification.
inline constexpr int exit_ok = 0, exit_usage = 1, exit_math = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "a", "a+bi", "-bi", "a-b i"; exact decimal reading.
Complex parse_complex(std::string_view text);
// "a+bi,c+di" -> c + j h
Quaternion parse_quaternion(std::string_view text);
// lambda = (n + 1) / 2 for odd n >= 1
double lambda_from_n(long n);

}  // namespace dym

#endif
