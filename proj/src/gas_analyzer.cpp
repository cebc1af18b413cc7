// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/gas_analyzer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mlcc {

namespace {

bool is_terminal_op(uint8_t op) {
    return op == OP_RETURN || op == OP_REVERT || op == OP_STOP || op == OP_INVALID;
}

}  // namespace

Cfg build_cfg(const SizedProgram& p, const FnSpan& fn, const GasSchedule& sched) {
    // instruction slice of the function
    std::vector<const SizedInstr*> instrs;
    for (const SizedInstr& si : p.instrs) {
        if (si.offset >= fn.entry && si.offset < fn.end) instrs.push_back(&si);
    }
    if (instrs.empty())
        throw GasAnalysisError("empty-function", fn.name + " has no instructions");

    std::map<size_t, size_t> index_of_offset;
    for (size_t i = 0; i < instrs.size(); ++i) index_of_offset[instrs[i]->offset] = i;

    auto target_offset = [&](const SizedInstr& jump, size_t idx) -> size_t {
        if (!jump.target_label.empty()) return p.label_addr.at(jump.target_label);
        // untagged jump: accept the PUSH-constant form, reject anything else
        if (idx > 0 && push_width(instrs[idx - 1]->opcode) > 0 && jump.jump == JumpKind::None)
            return instrs[idx - 1]->imm.fits_u64() ? instrs[idx - 1]->imm.as_u64() : SIZE_MAX;
        throw GasAnalysisError("dynamic-jump",
                               fn.name + ": jump at offset " + std::to_string(jump.offset) +
                                   " has no static target");
    };

    // leaders
    std::set<size_t> leaders;
    leaders.insert(0);
    for (size_t i = 0; i < instrs.size(); ++i) {
        const SizedInstr& si = *instrs[i];
        bool ends_block = false;
        if (si.opcode == OP_JUMP || si.opcode == OP_JUMPI) {
            ends_block = true;
            if (si.jump != JumpKind::Ret) {
                size_t t = target_offset(si, i);
                if (t >= fn.entry && t < fn.end && si.jump != JumpKind::Call)
                    leaders.insert(index_of_offset.at(t));
            }
        } else if (is_terminal_op(si.opcode)) {
            ends_block = true;
        }
        if (ends_block && i + 1 < instrs.size()) leaders.insert(i + 1);
    }
    for (size_t head : fn.loop_heads) {
        auto it = index_of_offset.find(head);
        if (it != index_of_offset.end()) leaders.insert(it->second);
    }

    Cfg cfg;
    cfg.fn_name = fn.name;
    std::vector<size_t> leader_list(leaders.begin(), leaders.end());
    std::map<size_t, size_t> block_of_instr;
    for (size_t b = 0; b < leader_list.size(); ++b) {
        size_t first = leader_list[b];
        size_t last = (b + 1 < leader_list.size() ? leader_list[b + 1] : instrs.size()) - 1;
        CfgBlock blk;
        blk.first_instr = first;
        blk.last_instr = last;
        blk.offset = instrs[first]->offset;
        for (size_t i = first; i <= last; ++i) {
            blk.sched_cost += sched.cost(instrs[i]->opcode);
            block_of_instr[i] = b;
        }
        cfg.blocks.push_back(blk);
    }

    // annotations and allocation sites fall into the block that holds the
    // instruction at their offset
    size_t end_offset = fn.end;
    for (const auto& a : p.annotations) {
        if (a.offset < fn.entry || a.offset >= end_offset) continue;
        auto it = index_of_offset.find(a.offset);
        if (it == index_of_offset.end()) continue;
        CfgBlock& blk = cfg.blocks[block_of_instr.at(it->second)];
        blk.ann_used += a.used;
        blk.ann_alloc += a.alloc;
    }
    for (const auto& s : p.alloc_sites) {
        if (s.offset < fn.entry || s.offset >= end_offset) continue;
        auto it = index_of_offset.find(s.offset);
        if (it == index_of_offset.end()) continue;
        cfg.blocks[block_of_instr.at(it->second)].alloc_bytes += s.bytes;
    }

    for (size_t head : fn.loop_heads) {
        auto it = index_of_offset.find(head);
        if (it != index_of_offset.end()) {
            size_t b = block_of_instr.at(it->second);
            cfg.blocks[b].is_loop_head = true;
            cfg.loop_head_blocks.push_back(b);
        }
    }

    // edges
    for (size_t b = 0; b < cfg.blocks.size(); ++b) {
        CfgBlock& blk = cfg.blocks[b];
        const SizedInstr& last = *instrs[blk.last_instr];
        auto add_edge = [&](size_t target_instr, EdgeKind kind) {
            blk.out.push_back(CfgEdge{block_of_instr.at(target_instr), kind});
        };
        if (last.opcode == OP_JUMP) {
            switch (last.jump) {
            case JumpKind::Ret:
                blk.terminal = true;
                break;
            case JumpKind::Call: {
                // summary edge: the callee pays for itself; control resumes
                // at the return label that follows the jump
                if (blk.last_instr + 1 < instrs.size())
                    add_edge(blk.last_instr + 1, EdgeKind::CallReturn);
                else
                    blk.terminal = true;
                break;
            }
            case JumpKind::Back:
                add_edge(index_of_offset.at(target_offset(last, blk.last_instr)), EdgeKind::Back);
                break;
            default: {
                size_t t = target_offset(last, blk.last_instr);
                if (t < fn.entry || t >= fn.end)
                    throw GasAnalysisError("dynamic-jump",
                                           fn.name + ": jump escapes the function");
                add_edge(index_of_offset.at(t), EdgeKind::Jump);
                break;
            }
            }
        } else if (last.opcode == OP_JUMPI) {
            size_t t = target_offset(last, blk.last_instr);
            if (t >= fn.entry && t < fn.end) add_edge(index_of_offset.at(t), EdgeKind::Branch);
            if (blk.last_instr + 1 < instrs.size())
                add_edge(blk.last_instr + 1, EdgeKind::Fallthrough);
        } else if (is_terminal_op(last.opcode)) {
            blk.terminal = true;
            // INVALID only appears as the unreachable tail of an exhaustive
            // match dispatch; walks ending there are not paths
            blk.dead = last.opcode == OP_INVALID;
        } else if (blk.last_instr + 1 < instrs.size()) {
            add_edge(blk.last_instr + 1, EdgeKind::Fallthrough);
        } else {
            blk.terminal = true;
        }
        std::sort(blk.out.begin(), blk.out.end(),
                  [](const CfgEdge& a, const CfgEdge& b) { return a.target < b.target; });
    }
    cfg.entry_block = 0;
    return cfg;
}

std::vector<GasPath> enumerate_paths(const Cfg& cfg, size_t cap) {
    std::vector<GasPath> out;

    struct Frame {
        std::vector<size_t> blocks;
    };

    auto finish_path = [&](const std::vector<size_t>& blocks, size_t entry, const char* kind) {
        if (cfg.blocks[blocks.back()].dead) return;
        GasPath path;
        path.blocks = blocks;
        path.entry_offset = cfg.blocks[entry].offset;
        path.entry_kind = kind;
        for (size_t b : blocks) {
            path.cost += cfg.blocks[b].sched_cost;
            path.alloc += cfg.blocks[b].alloc_bytes;
            path.bound_used += cfg.blocks[b].ann_used;
            path.bound_alloc += cfg.blocks[b].ann_alloc;
        }
        out.push_back(std::move(path));
        if (out.size() > cap)
            throw GasAnalysisError("path-explosion",
                                   cfg.fn_name + ": more than " + std::to_string(cap) + " paths");
    };

    auto walk = [&](size_t entry, const char* kind) {
        std::vector<std::pair<std::vector<size_t>, size_t>> stack;  // (prefix, next block)
        stack.emplace_back(std::vector<size_t>{}, entry);
        while (!stack.empty()) {
            auto [prefix, blk] = stack.back();
            stack.pop_back();
            prefix.push_back(blk);
            const CfgBlock& b = cfg.blocks[blk];
            if (b.terminal || b.out.empty()) {
                finish_path(prefix, entry, kind);
                continue;
            }
            bool extended = false;
            // deterministic order: later targets pushed first so smaller
            // block indices are explored first
            std::vector<const CfgEdge*> edges;
            for (const CfgEdge& e : b.out) edges.push_back(&e);
            bool any_followed = false;
            for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
                const CfgEdge& e = **it;
                if (cfg.blocks[e.target].is_loop_head) continue;  // cut at loop heads
                // revisiting a block would mean an untagged cycle
                if (std::find(prefix.begin(), prefix.end(), e.target) != prefix.end())
                    throw GasAnalysisError("dynamic-jump",
                                           cfg.fn_name + ": cycle without a tagged back edge");
                stack.emplace_back(prefix, e.target);
                any_followed = true;
            }
            extended = any_followed;
            if (!extended) finish_path(prefix, entry, kind);
            else {
                // if some successors were cut, the prefix up to the cut is
                // itself a complete path
                bool any_cut = false;
                for (const CfgEdge* e : edges)
                    if (cfg.blocks[e->target].is_loop_head) any_cut = true;
                if (any_cut) finish_path(prefix, entry, kind);
            }
        }
    };

    walk(cfg.entry_block, "entry");
    for (size_t head : cfg.loop_head_blocks) {
        if (head != cfg.entry_block) walk(head, "loop");
    }
    return out;
}

FunctionGasReport check_function(const SizedProgram& p, const FnSpan& fn,
                                 const GasSchedule& sched, size_t path_cap) {
    Cfg cfg = build_cfg(p, fn, sched);
    FunctionGasReport report;
    report.fn_name = fn.name;
    report.paths = enumerate_paths(cfg, path_cap);
    report.pass = true;
    for (GasPath& path : report.paths) {
        path.pass = path.cost <= path.bound_used && path.alloc <= path.bound_alloc;
        report.pass = report.pass && path.pass;
    }
    return report;
}

std::string FunctionGasReport::render() const {
    std::ostringstream o;
    for (const GasPath& p : paths) {
        o << "PATH " << fn_name << ":" << p.entry_kind << "@" << p.entry_offset
          << " cost=" << p.cost << " bound=" << p.bound_used << " alloc=" << p.alloc
          << " allocbound=" << p.bound_alloc << " " << (p.pass ? "PASS" : "FAIL") << "\n";
    }
    return o.str();
}

AffineBound measure_constants(const std::function<BigInt(uint64_t)>& measure,
                              const std::vector<uint64_t>& xs, bool require_exact) {
    if (xs.empty()) throw GasAnalysisError("non-affine", "no measurement points");
    std::vector<std::pair<uint64_t, BigInt>> pts;
    for (uint64_t x : xs) pts.emplace_back(x, measure(x));

    AffineBound bound;
    if (pts.size() == 1) {
        bound.step = BigInt(0);
        bound.base = pts[0].second;
        bound.max_residual = BigInt(0);
        return bound;
    }
    // least slope that dominates every pairwise growth: ceil over pairs
    BigInt best_step(0);
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[j].first == pts[i].first) continue;
            BigInt dy = pts[j].second - pts[i].second;
            BigInt dx = BigInt::from_u64(pts[j].first - pts[i].first);
            // ceil(dy/dx) for positive dx
            BigInt q = dy / dx;
            if (q * dx < dy) q += BigInt(1);
            if (q > best_step) best_step = q;
        }
    }
    if (best_step < BigInt(0)) best_step = BigInt(0);
    bound.step = best_step;
    bound.base = pts[0].second - bound.step * BigInt::from_u64(pts[0].first);
    for (const auto& [x, y] : pts) {
        BigInt b = y - bound.step * BigInt::from_u64(x);
        if (b > bound.base) bound.base = b;
    }
    bound.max_residual = BigInt(0);
    for (const auto& [x, y] : pts) {
        BigInt r = bound.at(x) - y;
        if (r > bound.max_residual) bound.max_residual = r;
    }
    if (require_exact && !bound.max_residual.is_zero())
        throw GasAnalysisError("non-affine",
                               "no affine function dominates with zero slack (max residual " +
                                   bound.max_residual.to_string() + ")");
    return bound;
}

FnProfile profile_function(const std::vector<TraceRow>& trace, const FnSpan& fn,
                           const TxResult& final_result, const GasSchedule& sched) {
    (void)sched;
    FnProfile prof;
    std::set<size_t> rets(fn.ret_sites.begin(), fn.ret_sites.end());
    int depth = 0;
    uint64_t start_sched = 0, start_alloc = 0;
    BigInt start_dg, start_da;
    for (size_t i = 0; i < trace.size(); ++i) {
        const TraceRow& row = trace[i];
        if (row.pc == fn.entry && row.op == OP_JUMPDEST) {
            if (depth == 0) {
                prof.entered = true;
                start_sched = row.sched_gas;
                start_alloc = row.alloc_meter;
                start_dg = row.declared_gas;
                start_da = row.declared_alloc;
            }
            ++depth;
        } else if (depth > 0 && rets.count(row.pc) && row.op == OP_JUMP) {
            --depth;
            if (depth == 0) {
                // measure up to (and including) the return jump
                if (i + 1 < trace.size()) {
                    prof.sched_gas += trace[i + 1].sched_gas - start_sched;
                    prof.alloc_bytes += trace[i + 1].alloc_meter - start_alloc;
                    prof.declared_gas += trace[i + 1].declared_gas - start_dg;
                    prof.declared_alloc += trace[i + 1].declared_alloc - start_da;
                } else {
                    prof.sched_gas += final_result.sched_gas - start_sched;
                    prof.alloc_bytes += final_result.alloc_bytes - start_alloc;
                    prof.declared_gas += final_result.declared_gas - start_dg;
                    prof.declared_alloc += final_result.declared_alloc - start_da;
                }
            }
        }
    }
    if (depth > 0) {  // never returned (revert or out of gas inside)
        prof.sched_gas += final_result.sched_gas - start_sched;
        prof.alloc_bytes += final_result.alloc_bytes - start_alloc;
        prof.declared_gas += final_result.declared_gas - start_dg;
        prof.declared_alloc += final_result.declared_alloc - start_da;
    }
    return prof;
}

}  // namespace mlcc
