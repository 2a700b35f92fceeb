#include "sitnikov/cli.hpp"

int main(int argc, char** argv) {
    return sitnikov::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
