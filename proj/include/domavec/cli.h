// The domavec command line. Exit status: 0 success, 1 runtime failure,
// 2 usage error (unknown flag, missing file, unknown matrix).

#ifndef DOMAVEC_CLI_H_
#define DOMAVEC_CLI_H_

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace domavec {

// Missing inputs and bad arguments; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads one word per line; blank lines and surrounding whitespace are dropped.
// Throws UsageError when the file cannot be opened.
std::vector<std::string> ReadWordList(const std::string& path);

}  // namespace domavec

#endif  // DOMAVEC_CLI_H_
