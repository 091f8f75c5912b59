#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "aitk/aitk.h"

#ifndef AITK_TABLE_DIR
#define AITK_TABLE_DIR "tables"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
    int code;
    std::string message;
};

int exit_code_for(aitk_status st) {
    switch (st) {
        case AITK_OK: return 0;
        case AITK_E_INVALID_ARGUMENT:
        case AITK_E_PARSE:
        case AITK_E_IO:
        case AITK_E_CONFIG: return kExitUsage;
        default: return kExitFailure;
    }
}

void check(aitk_status st) {
    if (st != AITK_OK) throw Failure{exit_code_for(st), aitk_last_error()};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitUsage, "cannot read '" + path + "'"};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Failure{kExitFailure, "cannot write '" + tmp.string() + "'"};
        out << text;
        if (!out.flush()) throw Failure{kExitFailure, "write failed for '" + tmp.string() + "'"};
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Failure{kExitFailure, "cannot rename into '" + path.string() + "': " + ec.message()};
}

struct Output {
    std::string dir;

    void prepare() const {
        if (dir.empty()) return;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw Failure{kExitFailure, "cannot create '" + dir + "': " + ec.message()};
    }

    void file(const std::string& name, const std::string& text) const {
        if (!dir.empty()) write_atomic(fs::path(dir) / name, text);
    }
};

std::string header(const std::string& command) {
    return std::string("# aitk ") + aitk_version() + "\ncommand = " + command + "\n";
}

std::string lines(aitk_strings* list) {
    std::string out;
    for (std::size_t i = 0; i < aitk_strings_size(list); ++i) out += std::string(aitk_strings_at(list, i)) + "\n";
    return out;
}

std::string summary_text(const aitk_report* r) {
    std::string out;
    for (std::size_t i = 0; i < aitk_report_size(r); ++i) {
        out += std::string(aitk_report_key(r, i)) + " = " + aitk_report_value(r, i) + "\n";
    }
    return out;
}

struct ReportHolder {
    aitk_report* r = nullptr;
    ~ReportHolder() { aitk_report_free(r); }
};

struct StringsHolder {
    aitk_strings* s = nullptr;
    ~StringsHolder() { aitk_strings_free(s); }
};

struct ModelHolder {
    aitk_model* m = nullptr;
    ~ModelHolder() { aitk_model_free(m); }
};

void load_model(const std::string& path, ModelHolder& holder) {
    if (path.empty()) return;
    read_file(path);  // reports unreadable files as usage errors
    check(aitk_model_load(path.c_str(), &holder.m));
}

// Emits a report: summary to stdout (and summary.txt), documents to --out.
// `print_docs` lists documents that also go to stdout.
void emit(const std::string& command, aitk_report* r, const Output& out, const std::vector<std::string>& print_docs) {
    const std::string summary = header(command) + summary_text(r);
    std::cout << summary;
    out.prepare();
    out.file("summary.txt", summary);
    for (std::size_t i = 0; i < aitk_report_doc_count(r); ++i) {
        const std::string name = aitk_report_doc_name(r, i);
        const std::string text = aitk_report_doc_text(r, i);
        out.file(name, text);
        for (const auto& p : print_docs) {
            if (p == name) std::cout << text;
        }
    }
}

std::string config_text(const std::string& path, const std::vector<std::string>& overrides) {
    std::string text = path.empty() ? std::string() : read_file(path);
    if (!text.empty() && text.back() != '\n') text += '\n';
    for (const auto& o : overrides) {
        if (o.find('=') == std::string::npos) throw Failure{kExitUsage, "--set expects key=value, got '" + o + "'"};
        text += o + "\n";
    }
    return text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-chain enumeration, information functionals, and regulated commons simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aitk_version()));

    std::string out_dir, model_path, config_path, tables_dir = AITK_TABLE_DIR, partition, family;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    int depth = 1, table = 1;
    unsigned order = 2;
    long long rounds = -1;
    bool apply_exceptions = false, all_partitions = false;

    auto common = [&](CLI::App* sub, bool with_config) {
        sub->add_option("--out", out_dir, "Directory for output files");
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
        if (with_config) {
            sub->add_option("--config", config_path, "Flat key = value config file");
            sub->add_option("--set", overrides, "Extra key=value config lines (applied last)");
        }
    };

    auto* enumerate = app.add_subcommand("enumerate", "List canonical topologies of a depth");
    common(enumerate, false);
    enumerate->add_option("--depth", depth, "Chain depth (0-2)")->check(CLI::Range(0, 2))->capture_default_str();
    enumerate->add_option("--partition", partition, "Partition of depth+1, e.g. 2,1");
    enumerate->add_flag("--all-partitions", all_partitions, "Enumerate groves for every partition");
    enumerate->add_option("--model", model_path, "Cost model file");

    auto* verify = app.add_subcommand("verify", "Diff enumeration against a reference table");
    common(verify, false);
    verify->add_option("--table", table, "Table id (0-2)")->check(CLI::Range(0, 2))->required();
    verify->add_option("--tables", tables_dir, "Directory holding tableN.txt")->capture_default_str();
    verify->add_option("--model", model_path, "Cost model file");
    verify->add_flag("--apply-exceptions", apply_exceptions, "Apply the model's documented exceptions");

    auto* situations = app.add_subcommand("situations", "List situation expressions of an order");
    common(situations, false);
    situations->add_option("--order", order, "Order (1-3)")->check(CLI::Range(1, 3))->capture_default_str();

    auto* info = app.add_subcommand("info", "Fisher information and Cramer-Rao report");
    common(info, true);
    auto* critical = app.add_subcommand("critical", "Solve for a critical point of a functional");
    common(critical, true);
    auto* geodesic = app.add_subcommand("geodesic", "Integrate a geodesic in lever space");
    common(geodesic, true);

    auto* simulate = app.add_subcommand("simulate", "Run the regulated commons game");
    common(simulate, true);
    simulate->add_option("--rounds", rounds, "Override the number of rounds")->check(CLI::NonNegativeNumber);
    simulate->add_option("--family", family, "Override the policy family");

    auto* optimize = app.add_subcommand("optimize", "Optimize a policy family's levers");
    common(optimize, true);
    optimize->add_option("--family", family, "Override the policy family");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const auto started = std::chrono::steady_clock::now();
    const Output out{out_dir};
    int code = 0;
    try {
        if (*enumerate) {
            ModelHolder model;
            load_model(model_path, model);
            std::string text;
            if (all_partitions) {
                StringsHolder parts;
                check(aitk_partitions(static_cast<unsigned>(depth + 1), &parts.s));
                for (std::size_t i = 0; i < aitk_strings_size(parts.s); ++i) {
                    StringsHolder list;
                    check(aitk_enumerate(depth, aitk_strings_at(parts.s, i), model.m, &list.s));
                    text += "# partition " + std::string(aitk_strings_at(parts.s, i)) + " (" +
                            std::to_string(aitk_strings_size(list.s)) + ")\n" + lines(list.s);
                }
            } else {
                StringsHolder list;
                check(aitk_enumerate(depth, partition.empty() ? nullptr : partition.c_str(), model.m, &list.s));
                text = lines(list.s);
            }
            std::cout << text;
            out.prepare();
            out.file("enumerate.txt", text);
            out.file("summary.txt", header("enumerate") + "depth = " + std::to_string(depth) + "\npartition = " +
                                        (all_partitions ? std::string("all") : partition.empty() ? "{" + std::to_string(depth + 1) + "}" : partition) +
                                        "\nmodel = " + (model_path.empty() ? std::string("shipped") : model_path) + "\n");
        } else if (*verify) {
            ModelHolder model;
            load_model(model_path, model);
            const std::string path = (fs::path(tables_dir) / ("table" + std::to_string(table) + ".txt")).string();
            read_file(path);
            ReportHolder r;
            check(aitk_verify_table(table, path.c_str(), model.m, apply_exceptions ? 1 : 0, &r.r));
            emit("verify", r.r, out, {"diff.txt"});
            const char* ok = aitk_report_get(r.r, "acceptable");
            code = ok && std::string(ok) == "true" ? 0 : kExitFailure;
        } else if (*situations) {
            StringsHolder list;
            check(aitk_situations(order, &list.s));
            const std::string text = lines(list.s);
            std::cout << text;
            out.prepare();
            out.file("situations.txt", text);
            out.file("summary.txt", header("situations") + "order = " + std::to_string(order) + "\ncount = " +
                                        std::to_string(aitk_strings_size(list.s)) + "\n");
        } else {
            if (config_path.empty() && overrides.empty() && !*info) {
                throw Failure{kExitUsage, "--config is required"};
            }
            const std::string cfg = config_text(config_path, overrides);
            ReportHolder r;
            aitk_status st = AITK_OK;
            std::string name;
            std::vector<std::string> print;
            if (*info) {
                name = "info";
                st = aitk_run_info(cfg.c_str(), &r.r);
            } else if (*critical) {
                name = "critical";
                st = aitk_run_critical(cfg.c_str(), seed, &r.r);
            } else if (*geodesic) {
                name = "geodesic";
                st = aitk_run_geodesic(cfg.c_str(), &r.r);
            } else if (*simulate) {
                name = "simulate";
                st = aitk_simulate(cfg.c_str(), seed, rounds, family.empty() ? nullptr : family.c_str(), &r.r);
            } else if (*optimize) {
                name = "optimize";
                st = aitk_optimize(cfg.c_str(), seed, family.empty() ? nullptr : family.c_str(), &r.r);
                print = {"policy.txt"};
            }
            const std::string message = st == AITK_OK ? std::string() : aitk_last_error();
            if (r.r) emit(name, r.r, out, print);
            if (st != AITK_OK) throw Failure{exit_code_for(st), message};
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        code = f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = kExitFailure;
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    std::cerr << "elapsed_ms = " << ms << "\n";
    return code;
}
