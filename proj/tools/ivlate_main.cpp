#include "ivlate/cli.hpp"

int main(int argc, char** argv) { return ivlate::cli::run_main(argc, argv); }
