#include "kmxx/harness.hpp"

int main(int argc, char** argv) { return kmxx::cli_main(argc, argv); }
