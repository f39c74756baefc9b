#include "cli.hpp"

int main(int argc, char** argv) { return balcert::run_cli(argc, argv); }
