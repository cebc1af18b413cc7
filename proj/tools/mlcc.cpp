// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0
//
// Subcommands: compile, check-gas, run, match, scenario.
// Exit codes: 0 success, 1 verification/assertion failure, 2 usage or I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mlcc/abi.hpp"
#include "mlcc/corpus.hpp"
#include "mlcc/codegen.hpp"
#include "mlcc/gas_analyzer.hpp"
#include "mlcc/interp_ir.hpp"
#include "mlcc/orderbook.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlcc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    out << data;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

GasSchedule load_schedule(const std::string& path) {
    if (path.empty()) return GasSchedule::defaults();
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot read schedule " + path);
    return GasSchedule::from_stream(in);
}

struct CompiledSource {
    CoreModule core;
    CompiledModule compiled;
};

CompiledSource compile_file(const std::string& path) {
    CompiledSource out;
    out.core = compile_to_core(read_file(path), stem_of(path));
    out.compiled = compile_module(out.core);
    return out;
}

int cmd_compile(const std::string& src, const std::string& outdir, bool json_out) {
    CompiledSource cs = compile_file(src);
    fs::create_directories(outdir.empty() ? "." : outdir);
    fs::path base = fs::path(outdir.empty() ? "." : outdir) / stem_of(src);
    write_file(base.string() + ".evm", render_hex(cs.compiled.code));
    write_file(base.string() + ".asm", render_asm(cs.compiled.sized));
    write_file(base.string() + ".gasmap", render_gasmap(cs.compiled.sized));
    write_file(base.string() + ".sym", render_symtab(cs.compiled.sized));
    if (json_out) {
        json j;
        j["source"] = src;
        j["bytes"] = cs.compiled.code.size();
        j["functions"] = json::array();
        for (const FnSpan& f : cs.compiled.sized.functions) {
            j["functions"].push_back({{"name", f.name},
                                      {"entry", f.entry},
                                      {"gas_checking", f.gas_checking},
                                      {"dispatchable", f.dispatchable}});
        }
        j["artifacts"] = {base.string() + ".evm", base.string() + ".asm",
                          base.string() + ".gasmap", base.string() + ".sym"};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "compiled " << src << ": " << cs.compiled.code.size() << " bytes -> "
                  << base.string() << ".{evm,asm,gasmap,sym}\n";
    }
    return kExitOk;
}

int cmd_check_gas(const std::string& src, const std::string& schedule_path, size_t path_cap,
                  bool json_out) {
    CompiledSource cs = compile_file(src);
    GasSchedule sched = load_schedule(schedule_path);
    bool all_pass = true;
    bool any_checked = false;
    json jout = json::array();
    for (const FnSpan& f : cs.compiled.sized.functions) {
        if (!f.gas_checking) continue;
        any_checked = true;
        FunctionGasReport rep = check_function(cs.compiled.sized, f, sched, path_cap);
        all_pass = all_pass && rep.pass;
        if (json_out) {
            json jf;
            jf["function"] = rep.fn_name;
            jf["pass"] = rep.pass;
            jf["paths"] = json::array();
            for (const GasPath& p : rep.paths) {
                jf["paths"].push_back({{"entry", p.entry_kind},
                                       {"offset", p.entry_offset},
                                       {"cost", p.cost},
                                       {"bound", p.bound_used},
                                       {"alloc", p.alloc},
                                       {"allocbound", p.bound_alloc},
                                       {"pass", p.pass}});
            }
            jout.push_back(jf);
        } else {
            std::cout << rep.render();
        }
    }
    if (json_out) std::cout << jout.dump(2) << "\n";
    if (!any_checked && !json_out)
        std::cout << "no function is marked [@gas_checking]; nothing to verify\n";
    return all_pass ? kExitOk : kExitVerification;
}

int cmd_run(const std::string& code_path, const std::string& calldata_hex, uint64_t gas,
            const std::string& caller_hex, bool trace, const std::string& gasmap_path,
            bool json_out) {
    std::string hex = read_file(code_path);
    while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r')) hex.pop_back();
    EvmWorld world;
    U256 contract(0xC0DE);
    world.at(contract).code = bytes_of_hex(hex);

    CodeMeta meta;
    if (!gasmap_path.empty()) meta = CodeMeta::from_gasmap_text(read_file(gasmap_path));

    TxRequest req;
    req.contract = contract;
    req.caller = caller_hex.empty() ? U256(0xCA11E4) : U256::from_hex(caller_hex);
    req.calldata = calldata_hex.empty() ? std::vector<uint8_t>{} : bytes_of_hex(calldata_hex);
    req.gas_limit = gas;
    if (!gasmap_path.empty()) req.meta = &meta;
    std::vector<TraceRow> rows;
    if (trace) req.trace = &rows;

    TxResult r = exec_tx(world, req);
    if (trace && !json_out)
        for (const TraceRow& row : rows) std::cout << row.render() << "\n";

    if (json_out) {
        json j;
        j["outcome"] = r.outcome_name();
        j["gas_used"] = r.gas_used;
        j["sched_gas"] = r.sched_gas;
        j["mem_gas"] = r.mem_gas;
        j["alloc_bytes"] = r.alloc_bytes;
        j["declared_gas"] = r.declared_gas.to_string();
        j["declared_alloc"] = r.declared_alloc.to_string();
        j["data"] = hex_of_bytes(r.data);
        json st = json::object();
        for (const auto& [slot, value] : world.at(contract).storage)
            st["0x" + slot.to_hex()] = "0x" + value.to_hex();
        j["storage"] = st;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "outcome: " << r.outcome_name() << "\n";
        std::cout << "gas_used: " << r.gas_used << " (schedule " << r.sched_gas << " + memory "
                  << r.mem_gas << ")\n";
        if (!r.data.empty()) std::cout << "data: 0x" << hex_of_bytes(r.data) << "\n";
        for (const auto& [slot, value] : world.at(contract).storage)
            std::cout << "storage 0x" << slot.to_hex() << " = 0x" << value.to_hex() << "\n";
    }
    return kExitOk;
}

int cmd_match(const std::string& book_path, bool oracle, bool json_out) {
    std::ifstream in(book_path);
    if (!in.good()) throw std::runtime_error("cannot read " + book_path);
    OrderBook book = load_order_book(in);
    TradeList trades = trading(book.buys, book.sells);
    auto chron = trades.in_construction_order();

    json j;
    j["trades"] = json::array();
    if (!json_out) std::cout << "trades (seller buyer amount):\n";
    for (const Trade& t : chron) {
        if (json_out)
            j["trades"].push_back({{"seller", t.seller_index},
                                   {"buyer", t.buyer_index},
                                   {"amount", t.amount.to_string()}});
        else
            std::cout << "  " << t.seller_index << " " << t.buyer_index << " "
                      << t.amount.to_string() << "\n";
    }
    BigInt total = nb_token(trades);
    j["total_tokens"] = total.to_string();
    if (!json_out) std::cout << "total tokens: " << total.to_string() << "\n";
    int rc = kExitOk;
    if (oracle) {
        BigInt best = oracle_max_tokens(book.buys, book.sells);
        bool optimal = best == total;
        j["oracle_max"] = best.to_string();
        j["optimal"] = optimal;
        if (!json_out)
            std::cout << "oracle max: " << best.to_string() << " -> "
                      << (optimal ? "optimal" : "NOT optimal") << "\n";
        if (!optimal) rc = kExitVerification;
    }
    if (json_out) std::cout << j.dump(2) << "\n";
    return rc;
}

int cmd_scenario(const std::string& scenario_path, const std::string& contract_path,
                 const std::string& mode, bool json_out) {
    corpus::Scenario s = corpus::Scenario::from_json_text(read_file(scenario_path));

    std::vector<corpus::ScenarioReport> reports;
    if (mode == "native" || mode == "both") reports.push_back(corpus::run_scenario_native(s));
    if (mode == "compiled" || mode == "both") {
        CompiledSource cs = compile_file(contract_path);
        reports.push_back(corpus::run_scenario_compiled(s, cs.core, cs.compiled));
    }
    if (reports.empty()) throw CLI::ValidationError("--mode must be native, compiled or both");

    bool pass = true;
    json j;
    j["scenario"] = s.name;
    for (const corpus::ScenarioReport& rep : reports) {
        pass = pass && rep.pass;
        if (json_out) {
            json jr;
            jr["mode"] = rep.mode;
            jr["pass"] = rep.pass;
            jr["steps"] = json::array();
            for (size_t i = 0; i < rep.steps.size(); ++i)
                jr["steps"].push_back({{"ok", rep.steps[i].ok},
                                       {"revert", rep.steps[i].revert_tag},
                                       {"note", rep.steps[i].note}});
            j["runs"].push_back(jr);
        } else {
            std::cout << rep.render();
        }
    }
    if (mode == "both") {
        corpus::AgreementReport agreement = corpus::compare_modes(reports[0], reports[1]);
        pass = pass && agreement.agreed;
        j["mode_agreement"] = agreement.agreed;
        if (!json_out)
            std::cout << "mode agreement: " << (agreement.agreed ? "yes" : "NO - " + agreement.detail)
                      << "\n";
        else if (!agreement.agreed)
            j["disagreement"] = agreement.detail;
    }
    if (json_out) {
        j["pass"] = pass;
        std::cout << j.dump(2) << "\n";
    }
    return pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mlcc: contract compiler, gas checker and EVM toolchain"};
    app.require_subcommand(1);
    bool json_out = false;
    app.add_flag("--json", json_out, "machine-readable output");

    auto* compile = app.add_subcommand("compile", "compile a .mlc module to EVM artifacts");
    std::string src, outdir;
    compile->add_option("source", src, "input .mlc file")->required();
    compile->add_option("-o,--out", outdir, "output directory (default: .)");

    auto* check = app.add_subcommand("check-gas", "verify gas/alloc annotations by path");
    std::string check_src, schedule_path;
    size_t path_cap = 100000;
    check->add_option("source", check_src, "input .mlc file")->required();
    check->add_option("--schedule", schedule_path, "gas schedule file");
    check->add_option("--path-cap", path_cap, "path enumeration cap");

    auto* run = app.add_subcommand("run", "execute bytecode as one transaction");
    std::string code_path, calldata_hex, caller_hex, gasmap_path;
    uint64_t gas_limit = 50'000'000;
    bool trace = false;
    run->add_option("code", code_path, "hex bytecode file (.evm)")->required();
    run->add_option("--calldata", calldata_hex, "calldata hex");
    run->add_option("--gas", gas_limit, "gas limit");
    run->add_option("--caller", caller_hex, "caller address (hex)");
    run->add_option("--gasmap", gasmap_path, "gasmap file for ghost counters");
    run->add_flag("--trace", trace, "one line per executed instruction");

    auto* match = app.add_subcommand("match", "match an order-book file");
    std::string book_path;
    bool oracle = false;
    match->add_option("book", book_path, "order book file")->required();
    match->add_flag("--oracle", oracle, "check optimality against the max-flow oracle");

    auto* scenario = app.add_subcommand("scenario", "run a market scenario");
    std::string scenario_path, contract_path = "corpus/market.mlc", mode = "both";
    scenario->add_option("scenario", scenario_path, "scenario JSON")->required();
    scenario->add_option("--contract", contract_path, "market contract source");
    scenario->add_option("--mode", mode, "native|compiled|both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // help text, success
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (compile->parsed()) return cmd_compile(src, outdir, json_out);
        if (check->parsed()) return cmd_check_gas(check_src, schedule_path, path_cap, json_out);
        if (run->parsed())
            return cmd_run(code_path, calldata_hex, gas_limit, caller_hex, trace, gasmap_path,
                           json_out);
        if (match->parsed()) return cmd_match(book_path, oracle, json_out);
        if (scenario->parsed()) return cmd_scenario(scenario_path, contract_path, mode, json_out);
    } catch (const CompileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const GasAnalysisError& e) {
        std::cerr << "error [" << e.rule << "]: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
