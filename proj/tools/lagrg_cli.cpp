// Experiment driver for the lagrg shared library. Loads a JSON config,
// dispatches the configured command and writes reproducible CSV/JSON
// artifacts. Errors are reported as machine-readable JSON on stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "lagrg.h"

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

int report_error(lagrg_status st) {
    std::cerr << "{\"error\":{\"code\":\"" << lagrg_status_name(st) << "\",\"message\":\""
              << json_escape(lagrg_last_error()) << "\"}}" << std::endl;
    return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lagrg: renormalization dynamics on Laguerre entire functions"};
    std::string config_path;
    std::string command;
    std::string out_dir;
    std::string precision;
    int max_iter = -1;
    bool quiet = false;

    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--command", command, "override the config's command");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}));
    app.add_option("--max-iter", max_iter, "override n_max");
    app.add_flag("--quiet", quiet, "suppress the artifact listing");

    CLI11_PARSE(app, argc, argv);

    if (precision.empty()) {
        if (const char* env = std::getenv("LAGRG_PRECISION")) precision = env;
    }
    int precision_override = -1;
    if (precision == "double") precision_override = LAGRG_PRECISION_DOUBLE;
    if (precision == "extended") precision_override = LAGRG_PRECISION_EXTENDED;

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "{\"error\":{\"code\":\"IoError\",\"message\":\"cannot read "
                  << json_escape(config_path) << "\"}}" << std::endl;
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    char* files = nullptr;
    lagrg_status st = lagrg_run_config(buf.str().c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                       command.empty() ? nullptr : command.c_str(),
                                       precision_override, max_iter, &files);
    if (st != LAGRG_OK) return report_error(st);
    if (!quiet && files) std::cout << files << std::endl;
    lagrg_string_free(files);
    return 0;
}
