#ifndef BALCERT_TOOLS_CLI_HPP
#define BALCERT_TOOLS_CLI_HPP

namespace balcert {
int run_cli(int argc, char** argv);
}

#endif
