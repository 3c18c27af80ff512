// Fake analyzer for the process runtime.
//
//   lines <contract>            "issue <RULE> <line> <message>" per hit, then "<N> issues"
//   json <outfile> <contract>   {"vulnerabilities": [...]} written to <outfile>
//   echo <words...>             prints the words
//   sleep <seconds>
//   crash                       garbage on stdout, exit status 3
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

struct Needle {
    std::string token;
    std::string rule;
};

struct Hit {
    std::string rule;
    std::size_t line;
    std::string message;
};

/// Substring search outside `//` comments.
std::vector<Hit> scan(const std::string& path, const std::vector<Needle>& needles) {
    std::ifstream in(path);
    std::vector<Hit> hits;
    std::size_t number = 0;
    for (std::string line; std::getline(in, line);) {
        ++number;
        const auto comment = line.find("//");
        const std::string code = line.substr(0, comment);
        for (const auto& needle : needles) {
            if (code.find(needle.token) != std::string::npos) {
                hits.push_back({needle.rule, number, "found " + needle.token});
            }
        }
    }
    return hits;
}

int usage() {
    std::cerr << "usage: solscan-mock-tool lines|json|echo|sleep|crash ...\n";
    return 64;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        return usage();
    }
    const std::string& mode = args[0];
    if (mode == "lines" && args.size() == 2) {
        const auto hits = scan(args[1], {{"block.timestamp", "MOCK_TIME"}, {".call", "MOCK_CALL"}});
        std::cout << "mock-lines 1.0 analyzing " << args[1] << '\n';
        for (const auto& hit : hits) {
            std::cout << "issue " << hit.rule << ' ' << hit.line << ' ' << hit.message << '\n';
        }
        std::cout << hits.size() << " issues\n";
        return 0;
    }
    if (mode == "json" && args.size() == 3) {
        const auto hits = scan(args[2], {{"selfdestruct", "MOCK_KILL"}, {"tx.origin", "MOCK_ORIGIN"}});
        nlohmann::json doc{{"vulnerabilities", nlohmann::json::array()}};
        for (const auto& hit : hits) {
            doc["vulnerabilities"].push_back({{"name", hit.rule}, {"line", hit.line}, {"description", hit.message}});
        }
        std::ofstream(args[1]) << doc.dump(2) << '\n';
        std::cout << "wrote " << hits.size() << " result(s)\n";
        return 0;
    }
    if (mode == "echo") {
        for (std::size_t i = 1; i < args.size(); ++i) {
            std::cout << (i > 1 ? " " : "") << args[i];
        }
        std::cout << '\n';
        return 0;
    }
    if (mode == "sleep" && args.size() >= 2) {
        std::this_thread::sleep_for(std::chrono::duration<double>(std::stod(args[1])));
        return 0;
    }
    if (mode == "crash") {
        std::cout << "\x01\x7f\xfe garbage \xff\n";
        std::cerr << "segmentation fault (simulated)\n";
        return 3;
    }
    return usage();
}
