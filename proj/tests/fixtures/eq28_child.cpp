// Child evaluator for the stdio protocol tests. Implements the example3 limit state.
// argv[1] selects a misbehaviour: ok (default), error, mismatch, garbage, exit.
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "ok";
    std::string line;
    while (std::getline(std::cin, line)) {
        const auto request = nlohmann::json::parse(line);
        const auto id = request.at("id").get<std::uint64_t>();
        const auto theta = request.at("theta").get<std::vector<double>>();
        nlohmann::json response{{"id", id}};
        if (mode == "error") {
            response["error"] = "nan";
        } else if (mode == "mismatch") {
            response["id"] = id + 1;
            response["g"] = 0.0;
        } else if (mode == "garbage") {
            std::cout << "not json\n" << std::flush;
            continue;
        } else if (mode == "exit") {
            return 0;
        } else {
            const double t1 = theta.at(0), t2 = theta.at(1);
            response["g"] = -(t1 * t1 + 4.0) * (t2 - 1.0) / 20.0 + std::sin(2.5 * t1) + 2.0;
        }
        std::cout << response.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n' << std::flush;
    }
    return 0;
}
