// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/typecheck.hpp"

#include <optional>

namespace mlcc {

namespace {

struct LocalVar {
    Type type;
    bool mutable_ = false;
};

class Checker {
public:
    Checker(SourceModule& m) : m_(m) {}

    TypeInfo run() {
        collect_decls();
        for (FunDecl& f : m_.functions) check_function(f);
        return std::move(info_);
    }

private:
    SourceModule& m_;
    TypeInfo info_;
    std::map<std::string, LocalVar>* scope_ = nullptr;
    const FunDecl* current_ = nullptr;
    bool in_spec_ = false;

    [[noreturn]] void err(SrcLoc loc, const std::string& rule, const std::string& msg) const {
        throw CompileError(loc, rule, msg);
    }

    // ---- declaration tables ----

    void resolve_type(Type& t, SrcLoc loc) {
        if (t.k != Type::K::Unresolved) return;
        if (m_.find_adt(t.name)) {
            t.k = Type::K::Adt;
        } else if (m_.find_record(t.name)) {
            t.k = Type::K::Record;
        } else {
            err(loc, "unknown-type", "unknown type `" + t.name + "`");
        }
    }

    void collect_decls() {
        for (AdtDecl& a : m_.adts) {
            for (uint32_t i = 0; i < a.ctors.size(); ++i) {
                CtorDecl& c = a.ctors[i];
                for (Type& f : c.fields) {
                    resolve_type(f, a.loc);
                    if (f.k == Type::K::Record || f.k == Type::K::Unit)
                        err(a.loc, "type", "constructor fields must be integers, booleans or "
                                           "algebraic types");
                }
                if (info_.ctors.count(c.name))
                    err(a.loc, "type", "duplicate constructor `" + c.name + "`");
                info_.ctors[c.name] = CtorInfo{a.name, i, c.fields};
            }
        }
        for (RecordDecl& r : m_.records) {
            for (FieldDecl& f : r.fields) {
                resolve_type(f.type, r.loc);
                if (!f.type.is_word())
                    err(r.loc, "type",
                        "record fields must be word-sized (integers or booleans)");
            }
        }
        for (GlobalDecl& g : m_.globals) {
            if (g.is_map) continue;
            resolve_type(g.type, g.loc);
            if (g.type.k == Type::K::Record) {
                const RecordDecl* r = m_.find_record(g.type.name);
                for (const FieldDecl& f : r->fields) {
                    if (!f.type.is_word())
                        err(g.loc, "global-shape",
                            "global record fields are restricted to integers");
                }
            } else if (!g.type.is_word()) {
                err(g.loc, "global-shape",
                    "globals are restricted to integer records and integer scalars");
            }
        }
        for (FunDecl& f : m_.functions) {
            for (Param& p : f.params) {
                resolve_type(p.type, f.loc);
                if (!p.type.is_word() && p.type.k != Type::K::Adt)
                    err(f.loc, "type", "parameters must be word-sized or algebraic values");
            }
            resolve_type(f.ret, f.loc);
        }
    }

    // ---- expression checking ----

    Type unify(SrcLoc loc, const Type& a, const Type& b) {
        if (a.k == Type::K::Never) return b;
        if (b.k == Type::K::Never) return a;
        if (a == b) return a;
        // Specification clauses live in the mathematical integers; widths
        // do not constrain them.
        if (in_spec_ && a.is_int() && b.is_int()) return Type::intk(kUint256);
        err(loc, a.is_int() && b.is_int() ? "kind-match" : "type",
            "mismatched types: " + a.str() + " vs " + b.str());
    }

    bool has_expected(const Type& t) const { return t.k != Type::K::Unresolved; }

    Type check(Expr& e, const Type& expected) {
        Type t = infer(e, expected);
        if (has_expected(expected)) t = unify(e.loc, t, expected);
        e.type = t;
        return t;
    }

    Type infer(Expr& e, const Type& expected) {
        switch (e.k) {
        case Expr::K::IntLit: {
            if (in_spec_) return Type::intk(kUint256);  // mathematical
            Type t = has_expected(expected) && expected.is_int() ? expected
                                                                 : Type::intk(kUint256);
            if (!t.is_int()) err(e.loc, "type", "integer literal used as " + expected.str());
            if (!raw_in_range(t.kind, e.value))
                err(e.loc, "kind-match",
                    "literal does not fit " + t.kind.name());
            return t;
        }
        case Expr::K::BoolLit: return Type::boolean();
        case Expr::K::UnitLit: return Type::unit();
        case Expr::K::Var: return infer_var(e);
        case Expr::K::Let: {
            Type bound = check(e.kids[0], Type{});
            if (bound.k == Type::K::Unit)
                err(e.loc, "type", "let-binding of a unit value; use `;` sequencing");
            if (m_.find_global(e.name))
                err(e.loc, "type", "binding `" + e.name + "` shadows a global");
            auto saved = (*scope_).find(e.name) != scope_->end()
                             ? std::optional<LocalVar>((*scope_)[e.name])
                             : std::nullopt;
            (*scope_)[e.name] = LocalVar{bound, e.flag};
            Type t = check(e.kids[1], expected);
            if (saved) (*scope_)[e.name] = *saved;
            else scope_->erase(e.name);
            return t;
        }
        case Expr::K::Seq: {
            check(e.kids[0], Type::unit());
            return check(e.kids[1], expected);
        }
        case Expr::K::If: {
            check(e.kids[0], Type::boolean());
            if (e.kids.size() == 2) {
                check(e.kids[1], Type::unit());
                return Type::unit();
            }
            Type a = check(e.kids[1], expected);
            Type b = check(e.kids[2], expected);
            return unify(e.loc, a, b);
        }
        case Expr::K::While: {
            check(e.kids[0], Type::boolean());
            check(e.kids[1], Type::unit());
            return Type::unit();
        }
        case Expr::K::Match: return infer_match(e, expected);
        case Expr::K::RecordLit: return infer_record_lit(e);
        case Expr::K::FieldRead: {
            Type owner = check(e.kids[0], Type{});
            if (owner.k != Type::K::Record)
                err(e.loc, "type", "field access on non-record value");
            const RecordDecl* r = m_.find_record(owner.name);
            for (const FieldDecl& f : r->fields)
                if (f.name == e.field) return f.type;
            err(e.loc, "type", "record `" + owner.name + "` has no field `" + e.field + "`");
        }
        case Expr::K::FieldAssign: {
            Type owner = check(e.kids[0], Type{});
            if (owner.k != Type::K::Record)
                err(e.loc, "type", "field assignment on non-record value");
            const RecordDecl* r = m_.find_record(owner.name);
            for (const FieldDecl& f : r->fields) {
                if (f.name == e.field) {
                    check(e.kids[1], f.type);
                    return Type::unit();
                }
            }
            err(e.loc, "type", "record `" + owner.name + "` has no field `" + e.field + "`");
        }
        case Expr::K::Call: return infer_call(e, expected);
        case Expr::K::CtorApp: return infer_ctor(e);
        case Expr::K::Bin: return infer_bin(e, expected);
        case Expr::K::Not:
            check(e.kids[0], Type::boolean());
            return Type::boolean();
        case Expr::K::Raise:
            require_exception(e.loc, e.name);
            return Type::never();
        case Expr::K::Guard:
            require_exception(e.loc, e.name);
            check(e.kids[0], Type::boolean());
            return Type::unit();
        case Expr::K::AddGas: {
            for (Expr& kid : e.kids) {
                if (kid.k != Expr::K::IntLit)
                    err(kid.loc, "gas-annotation-constant",
                        "add_gas arguments must be non-negative integer constants");
                check(kid, Type::intk(kUint256));
            }
            return Type::unit();
        }
        case Expr::K::Send:
            check(e.kids[0], Type::intk(kUint256));
            check(e.kids[1], Type::intk(kUint256));
            return Type::unit();
        case Expr::K::Emit:
            check(e.kids[0], Type::intk(kUint256));
            return Type::unit();
        case Expr::K::Caller: return Type::intk(kUint256);
        case Expr::K::VarAssign: {
            auto it = scope_->find(e.name);
            if (it == scope_->end())
                err(e.loc, "type", "unknown variable `" + e.name + "`");
            if (!it->second.mutable_)
                err(e.loc, "type", "`" + e.name + "` is not a mutable binding");
            check(e.kids[0], it->second.type);
            return Type::unit();
        }
        case Expr::K::MapRead:
            require_map(e.loc, e.name);
            check(e.kids[0], Type::intk(kUint256));
            return Type::intk(kUint256);
        case Expr::K::MapAssign:
            require_map(e.loc, e.name);
            check(e.kids[0], Type::intk(kUint256));
            check(e.kids[1], Type::intk(kUint256));
            return Type::unit();
        case Expr::K::MapMem:
            require_map(e.loc, e.name);
            check(e.kids[0], Type::intk(kUint256));
            return Type::boolean();
        case Expr::K::MapDel:
            require_map(e.loc, e.name);
            check(e.kids[0], Type::intk(kUint256));
            return Type::unit();
        case Expr::K::Old:
            if (!in_spec_) err(e.loc, "spec-language", "`old` is only allowed in contracts");
            return check(e.kids[0], expected);
        case Expr::K::GasCounter:
        case Expr::K::AllocCounter:
            if (!in_spec_)
                err(e.loc, "spec-language", "gas/alloc counters are only allowed in contracts");
            return Type::intk(kUint256);  // mathematical in evaluation
        }
        err(e.loc, "type", "unreachable expression kind");
    }

    Type infer_var(Expr& e) {
        if (auto it = scope_->find(e.name); it != scope_->end()) return it->second.type;
        for (const Param& p : current_->params)
            if (p.name == e.name) return p.type;
        if (auto it = info_.ctors.find(e.name); it != info_.ctors.end()) {
            if (!it->second.fields.empty())
                err(e.loc, "type", "constructor `" + e.name + "` expects arguments");
            e.k = Expr::K::CtorApp;
            return Type::adt(it->second.adt);
        }
        if (const GlobalDecl* g = m_.find_global(e.name)) {
            if (g->is_map)
                err(e.loc, "map-use", "maps are used via m[k], `mem` and `del`");
            return g->type;
        }
        err(e.loc, "type", "unknown variable `" + e.name + "`");
    }

    Type infer_match(Expr& e, const Type& expected) {
        Type scrut = check(e.kids[0], Type{});
        if (scrut.k != Type::K::Adt)
            err(e.loc, "type", "match scrutinee must have an algebraic type");
        const AdtDecl* adt = m_.find_adt(scrut.name);
        std::vector<bool> seen(adt->ctors.size(), false);
        Type result = has_expected(expected) ? expected : Type::never();
        for (MatchArm& arm : e.arms) {
            auto it = info_.ctors.find(arm.ctor);
            if (it == info_.ctors.end() || it->second.adt != scrut.name)
                err(arm.loc, "type",
                    "`" + arm.ctor + "` is not a constructor of " + scrut.name);
            if (seen[it->second.tag])
                err(arm.loc, "match-exhaustive", "duplicate arm for `" + arm.ctor + "`");
            seen[it->second.tag] = true;
            if (arm.binders.size() != it->second.fields.size())
                err(arm.loc, "type", "`" + arm.ctor + "` expects " +
                                         std::to_string(it->second.fields.size()) + " binders");
            std::map<std::string, std::optional<LocalVar>> saved;
            for (size_t i = 0; i < arm.binders.size(); ++i) {
                const std::string& b = arm.binders[i];
                if (b == "_") continue;
                saved[b] = scope_->count(b) ? std::optional<LocalVar>((*scope_)[b]) : std::nullopt;
                (*scope_)[b] = LocalVar{it->second.fields[i], false};
            }
            Type t = check(arm.body[0], result.k == Type::K::Never ? Type{} : result);
            result = unify(arm.loc, result, t);
            for (auto& [name, old] : saved) {
                if (old) (*scope_)[name] = *old;
                else scope_->erase(name);
            }
        }
        for (size_t i = 0; i < seen.size(); ++i) {
            if (!seen[i])
                err(e.loc, "match-exhaustive",
                    "missing arm for constructor `" + adt->ctors[i].name + "`");
        }
        return result;
    }

    Type infer_record_lit(Expr& e) {
        // The record type is identified by its field-name set.
        const RecordDecl* match = nullptr;
        for (const RecordDecl& r : m_.records) {
            if (r.fields.size() != e.rec_fields.size()) continue;
            bool ok = true;
            for (const FieldDecl& f : r.fields) {
                bool found = false;
                for (const std::string& n : e.rec_fields) found |= (n == f.name);
                if (!found) { ok = false; break; }
            }
            if (ok) {
                if (match)
                    err(e.loc, "type", "record literal matches several record types");
                match = &r;
            }
        }
        if (!match) err(e.loc, "type", "record literal matches no declared record type");
        for (size_t i = 0; i < e.rec_fields.size(); ++i) {
            const FieldDecl* fd = nullptr;
            for (const FieldDecl& f : match->fields)
                if (f.name == e.rec_fields[i]) fd = &f;
            check(e.kids[i], fd->type);
        }
        e.name = match->name;
        return Type::record(match->name);
    }

    Type infer_ctor(Expr& e) {
        const CtorInfo& c = info_.ctors.at(e.name);
        for (size_t i = 0; i < e.kids.size(); ++i) check(e.kids[i], c.fields[i]);
        return Type::adt(c.adt);
    }

    Type infer_call(Expr& e, const Type&) {
        if (auto it = info_.ctors.find(e.name); it != info_.ctors.end()) {
            e.k = Expr::K::CtorApp;
            if (e.kids.size() != it->second.fields.size())
                err(e.loc, "type", "constructor `" + e.name + "` expects " +
                                       std::to_string(it->second.fields.size()) + " arguments");
            return infer_ctor(e);
        }
        const FunDecl* f = m_.find_function(e.name);
        if (!f) err(e.loc, "type", "unknown function `" + e.name + "`");
        bool declared_before = false;
        for (const FunDecl& g : m_.functions) {
            if (&g == current_) break;
            if (&g == f) declared_before = true;
        }
        bool self = f == current_;
        if (self && !current_->is_rec)
            err(e.loc, "type", "recursive call in a non-`rec` function");
        if (!self && !declared_before)
            err(e.loc, "type", "function `" + e.name + "` is used before its definition");
        if (in_spec_) err(e.loc, "spec-language", "calls are not allowed in contracts");
        // `f ()` invokes a nullary function
        if (f->params.empty() && e.kids.size() == 1 && e.kids[0].k == Expr::K::UnitLit)
            e.kids.clear();
        if (e.kids.size() != f->params.size())
            err(e.loc, "type", "`" + e.name + "` expects " + std::to_string(f->params.size()) +
                                   " arguments, got " + std::to_string(e.kids.size()));
        for (size_t i = 0; i < e.kids.size(); ++i) check(e.kids[i], f->params[i].type);
        return f->ret;
    }

    Type infer_bin(Expr& e, const Type& expected) {
        switch (e.op) {
        case BinOp::And:
        case BinOp::Or:
            check(e.kids[0], Type::boolean());
            check(e.kids[1], Type::boolean());
            return Type::boolean();
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: {
            Type t = infer_operand_pair(e);
            if (!t.is_word())
                err(e.loc, "type", "comparisons apply to word-sized values");
            if (t.k == Type::K::Bool && is_comparison(e.op) && e.op != BinOp::Eq &&
                e.op != BinOp::Ne)
                err(e.loc, "type", "ordering comparison on booleans");
            return Type::boolean();
        }
        default: {  // arithmetic
            Type t = has_expected(expected) && expected.is_int()
                         ? infer_operand_pair(e, expected)
                         : infer_operand_pair(e);
            if (!t.is_int()) err(e.loc, "type", "arithmetic on non-integer values");
            if ((e.op == BinOp::Div || e.op == BinOp::Mod) && t.kind.is_signed && !in_spec_)
                err(e.loc, "signed-division",
                    "signed division is not supported in compiled code");
            return t;
        }
        }
    }

    // Types both operands, letting a literal adopt the other side's kind.
    Type infer_operand_pair(Expr& e, const Type& expected = Type{}) {
        Expr& a = e.kids[0];
        Expr& b = e.kids[1];
        bool a_lit = a.k == Expr::K::IntLit;
        bool b_lit = b.k == Expr::K::IntLit;
        if (has_expected(expected)) {
            Type t = check(a, expected);
            check(b, t);
            return t;
        }
        if (a_lit && !b_lit) {
            Type t = check(b, Type{});
            check(a, t);
            return t;
        }
        Type t = check(a, Type{});
        check(b, t);
        return t;
    }

    void require_exception(SrcLoc loc, const std::string& name) {
        if (!m_.has_exception(name))
            err(loc, "type", "unknown exception `" + name + "`");
    }

    void require_map(SrcLoc loc, const std::string& name) {
        const GlobalDecl* g = m_.find_global(name);
        if (!g || !g->is_map) err(loc, "map-use", "`" + name + "` is not a map global");
    }

    // ---- per-function checks ----

    void check_function(FunDecl& f) {
        current_ = &f;
        std::map<std::string, LocalVar> scope;
        scope_ = &scope;

        check(f.body[0], f.ret);

        in_spec_ = true;
        for (Expr& r : f.requires_) {
            check_spec_shape(r);
            check(r, Type::boolean());
        }
        for (Expr& en : f.ensures_) {
            check_spec_shape(en);
            check(en, Type::boolean());
        }
        for (Expr& v : f.variant_) {
            check_spec_shape(v);
            check(v, Type{});
        }
        in_spec_ = false;

        FunInfo fi;
        analyze_effects(f.body[0], fi);
        bool mutated = false;
        check_raise_discipline(f, f.body[0], mutated);
        info_.funs[f.name] = fi;
        scope_ = nullptr;
        current_ = nullptr;
    }

    // The executable specification fragment: boolean combinations of
    // comparisons over parameters, globals, old snapshots and counters.
    void check_spec_shape(const Expr& e) {
        switch (e.k) {
        case Expr::K::IntLit:
        case Expr::K::BoolLit:
        case Expr::K::Var:
        case Expr::K::GasCounter:
        case Expr::K::AllocCounter:
        case Expr::K::Caller:
            return;
        case Expr::K::FieldRead:
        case Expr::K::MapRead:
        case Expr::K::MapMem:
        case Expr::K::Old:
        case Expr::K::Bin:
        case Expr::K::Not:
            for (const Expr& kid : e.kids) check_spec_shape(kid);
            return;
        default:
            err(e.loc, "spec-language",
                "contracts are restricted to comparisons over parameters, globals, old "
                "snapshots and the gas/alloc counters");
        }
    }

    void analyze_effects(const Expr& e, FunInfo& fi) {
        switch (e.k) {
        case Expr::K::FieldAssign: {
            // Only storage-backed writes count as mutation.
            const Expr& root = e.kids[0];
            if (root.k == Expr::K::Var && m_.find_global(root.name) && !scope_->count(root.name))
                fi.mutates = true;
            break;
        }
        case Expr::K::MapAssign:
        case Expr::K::MapDel:
        case Expr::K::Send:
            fi.mutates = true;
            break;
        case Expr::K::Raise:
        case Expr::K::Guard:
            fi.raises = true;
            break;
        case Expr::K::Call: {
            auto it = info_.funs.find(e.name);
            const FunInfo callee = it != info_.funs.end() ? it->second : FunInfo{};
            fi.mutates |= callee.mutates;
            fi.raises |= callee.raises;
            break;
        }
        default: break;
        }
        for (const Expr& kid : e.kids) analyze_effects(kid, fi);
        for (const MatchArm& arm : e.arms) analyze_effects(arm.body[0], fi);
    }

    bool expr_mutates(const Expr& e) const {
        FunInfo fi;
        const_cast<Checker*>(this)->analyze_effects(e, fi);
        return fi.mutates;
    }
    bool expr_raises(const Expr& e) const {
        FunInfo fi;
        const_cast<Checker*>(this)->analyze_effects(e, fi);
        return fi.raises;
    }

    // Raise sites must precede every mutation site in evaluation order and
    // may appear only in public functions.
    void check_raise_discipline(const FunDecl& f, const Expr& e, bool& mutated) {
        auto on_raise = [&](SrcLoc loc) {
            if (!f.is_public)
                err(loc, "raise-discipline",
                    "raise in private function `" + f.name + "`; private functions carry "
                    "requires clauses instead");
            if (mutated)
                err(loc, "raise-discipline",
                    "raise after a state mutation in `" + f.name + "`");
        };
        switch (e.k) {
        case Expr::K::Raise:
        case Expr::K::Guard:
            for (const Expr& kid : e.kids) check_raise_discipline(f, kid, mutated);
            on_raise(e.loc);
            return;
        case Expr::K::Call: {
            for (const Expr& kid : e.kids) check_raise_discipline(f, kid, mutated);
            auto it = info_.funs.find(e.name);
            FunInfo callee = it != info_.funs.end() ? it->second : FunInfo{};
            if (e.name == f.name) {  // self-recursion: effects of this body
                callee.mutates = expr_mutates(f.body[0]);
                callee.raises = expr_raises(f.body[0]);
            }
            if (callee.raises) on_raise(e.loc);
            if (callee.mutates) mutated = true;
            return;
        }
        case Expr::K::If: {
            check_raise_discipline(f, e.kids[0], mutated);
            bool m_then = mutated, m_else = mutated;
            check_raise_discipline(f, e.kids[1], m_then);
            if (e.kids.size() == 3) check_raise_discipline(f, e.kids[2], m_else);
            mutated = m_then || m_else;
            return;
        }
        case Expr::K::Match: {
            check_raise_discipline(f, e.kids[0], mutated);
            bool any = mutated;
            for (const MatchArm& arm : e.arms) {
                bool m_arm = mutated;
                check_raise_discipline(f, arm.body[0], m_arm);
                any = any || m_arm;
            }
            mutated = any;
            return;
        }
        case Expr::K::While: {
            check_raise_discipline(f, e.kids[0], mutated);
            const Expr& body = e.kids[1];
            if (expr_raises(body) && (mutated || expr_mutates(body)))
                err(e.loc, "raise-discipline",
                    "a loop that mutates state cannot also raise");
            bool m_body = mutated;
            check_raise_discipline(f, body, m_body);
            mutated = m_body;
            return;
        }
        case Expr::K::FieldAssign: {
            for (const Expr& kid : e.kids) check_raise_discipline(f, kid, mutated);
            const Expr& root = e.kids[0];
            if (root.k == Expr::K::Var && m_.find_global(root.name)) mutated = true;
            return;
        }
        case Expr::K::MapAssign:
        case Expr::K::MapDel:
        case Expr::K::Send:
            for (const Expr& kid : e.kids) check_raise_discipline(f, kid, mutated);
            mutated = true;
            return;
        default:
            for (const Expr& kid : e.kids) check_raise_discipline(f, kid, mutated);
            for (const MatchArm& arm : e.arms) {
                bool m_arm = mutated;  // arms are alternatives
                check_raise_discipline(f, arm.body[0], m_arm);
                mutated = mutated || m_arm;
            }
            return;
        }
    }
};

}  // namespace

TypeInfo typecheck(SourceModule& m) { return Checker(m).run(); }

}  // namespace mlcc
