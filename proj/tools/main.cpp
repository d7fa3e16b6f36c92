#include "cli.hpp"

int main(int argc, char** argv) { return lagsync::cli::dispatch(argc, argv); }
