// Acceptance suite runner: executes every criterion at its pinned tolerance
// and prints one pass/fail line per criterion.

#include <cstdlib>
#include <iostream>

#include "speclab/acceptance.hpp"

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "acceptance";
    try {
        const auto rep = speclab::acceptance::verify(suite);
        speclab::acceptance::print_report(rep, std::cout);
        return rep.all_pass ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return EXIT_FAILURE;
    }
}
