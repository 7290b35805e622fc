#include "appsteg/cli.hpp"

int main(int argc, char** argv) { return appsteg::run_cli(argc, argv); }
