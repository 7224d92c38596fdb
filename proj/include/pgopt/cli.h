#ifndef PGOPT_CLI_H_
#define PGOPT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pgopt {

// Entry point of the `pgopt` tool. args excludes the program name.
int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgopt

#endif  // PGOPT_CLI_H_
