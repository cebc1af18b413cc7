// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "mlcc/core_ir.hpp"
#include "test_support.hpp"
#include "mlcc/parser.hpp"
#include "mlcc/typecheck.hpp"

using namespace mlcc;

namespace {

std::string rule_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const CompileError& e) {
        return e.rule;
    }
    return "";
}

const char* kMkList42 = R"(
type intlist = Nil | Cons int32 intlist

let rec mk_list42 [@gas_checking] (i : int32) : intlist
  requires { 0 <= i }
  ensures { gas - old gas <= i * 185 + 113 }
  ensures { alloc - old alloc <= i * 96 + 32 }
  variant { i }
=
  if i <= 0 then (add_gas 113 32; Nil)
  else (let l = mk_list42 (i - 1) in add_gas 185 96; Cons 0x42 l)
)";

}  // namespace

TEST_CASE("tokenize basics") {
    auto toks = tokenize("let x = 1");
    REQUIRE(toks.size() == 5);  // let, x, =, 1, eof
    CHECK(toks[0].kind == Tok::KwLet);
    CHECK(toks[1].kind == Tok::Ident);
    CHECK(toks[1].text == "x");
    CHECK(toks[2].kind == Tok::Eq);
    CHECK(toks[3].kind == Tok::Int);
    CHECK(toks[3].value == U256(1));

    auto hex = tokenize("0x2A");
    CHECK(hex[0].value == U256(42));

    CHECK(rule_of([] { tokenize("(* never closed"); }) == "lex");
    try {
        tokenize("ok (* open");
    } catch (const CompileError& e) {
        CHECK(e.loc.column == 4);  // reported at the opening position
    }
    CHECK(tokenize("a (* x (* nested *) y *) b").size() == 3);
}

TEST_CASE("locations are tracked") {
    auto toks = tokenize("let\n  foo");
    CHECK(toks[1].loc.line == 2);
    CHECK(toks[1].loc.column == 3);
}

TEST_CASE("parse the recursive list builder") {
    SourceModule m = parse_source(kMkList42);
    REQUIRE(m.functions.size() == 1);
    const FunDecl& f = m.functions[0];
    CHECK(f.name == "mk_list42");
    CHECK(f.is_rec);
    CHECK(f.gas_checking);
    CHECK(!f.is_public);
    CHECK(f.requires_.size() == 1);
    CHECK(f.ensures_.size() == 2);
    CHECK(f.variant_.size() == 1);
    REQUIRE(f.body[0].k == Expr::K::If);
    CHECK(f.body[0].kids.size() == 3);  // two branches, no match needed
}

TEST_CASE("nested patterns are rejected with the named rule") {
    const char* nested = R"(
type intlist = Nil | Cons int32 intlist
let private f (l : intlist) : int32 =
  match l with
  | Nil -> 0
  | Cons x (Cons y r) -> x
  end
)";
    CHECK(rule_of([&] { parse_source(nested); }) == "non-nested-patterns");
}

TEST_CASE("try/with is rejected with the named rule") {
    CHECK(rule_of([] { parse_source("let private f (x : uint256) : uint256 = try f x with"); }) ==
          "no-try-with");
}

TEST_CASE("parse/print round trip is structurally identical") {
    const char* sources[] = {
        kMkList42,
        R"(
record cfg = { owner : uint256; open : bool }
global st : cfg
global balanceOf : map
exception OnlyOwner
let public poke (a : uint256) (v : uint256) : unit
  requires { 0 <= v }
=
  guard (caller = st.owner) OnlyOwner;
  if mem balanceOf a then (del balanceOf a; ())
  else (balanceOf[a] <- v; st.open <- true; emit Poked a)
)",
        R"(
let private loopy (n : uint256) : uint256 =
  let mut i = 0 in
  let mut acc = 0 in
  (while i < n do (acc := acc + i * 2; i := i + 1) done; acc)
)",
    };
    for (const char* src : sources) {
        SourceModule m1 = parse_source(src);
        std::string printed = print_module(m1);
        SourceModule m2 = parse_source(printed);
        CHECK(ast_equal(m1, m2));
        // printing is a fixed point after one round
        CHECK(print_module(m2) == printed);
    }
}

TEST_CASE("parse/print round trip holds for the shipped corpus") {
    for (const char* rel : {"corpus/market.mlc", "corpus/gas_demo.mlc"}) {
        std::ifstream in(mlcc::test::source_dir() + "/" + rel);
        REQUIRE(in.good());
        std::stringstream ss;
        ss << in.rdbuf();
        SourceModule m1 = parse_source(ss.str());
        SourceModule m2 = parse_source(print_module(m1));
        CHECK(ast_equal(m1, m2));
    }
}

TEST_CASE("empty modules are rejected") {
    CHECK_THROWS_AS(parse_source(""), CompileError);
    CHECK_THROWS_AS(parse_source("(* only a comment *)"), CompileError);
}

TEST_CASE("typecheck accepts the corpus shapes and assigns kinds") {
    SourceModule m = parse_source(kMkList42);
    CHECK_NOTHROW(typecheck(m));
    // literal adopted the int32 kind of its context
    const Expr& body = m.functions[0].body[0];
    const Expr& cond = body.kids[0];
    REQUIRE(cond.k == Expr::K::Bin);
    CHECK(cond.kids[0].type == Type::intk(kInt32));
    CHECK(cond.kids[1].type == Type::intk(kInt32));
}

TEST_CASE("raise discipline: private functions may not raise") {
    const char* bad = R"(
exception Nope
let private f (x : uint256) : uint256 =
  if x = 0 then raise Nope else x
)";
    SourceModule m = parse_source(bad);
    CHECK(rule_of([&] { typecheck(m); }) == "raise-discipline");
}

TEST_CASE("raise discipline: no raise after mutation") {
    const char* bad = R"(
record cfg = { n : uint256 }
global st : cfg
exception Nope
let public f (x : uint256) : uint256 =
  st.n <- x;
  if x = 0 then raise Nope else x
)";
    SourceModule m = parse_source(bad);
    CHECK(rule_of([&] { typecheck(m); }) == "raise-discipline");

    const char* good = R"(
record cfg = { n : uint256 }
global st : cfg
exception Nope
let public f (x : uint256) : uint256 =
  if x = 0 then raise Nope;
  st.n <- x;
  x
)";
    SourceModule m2 = parse_source(good);
    CHECK_NOTHROW(typecheck(m2));
}

TEST_CASE("raise discipline: transitively raising callee counts as a raise site") {
    const char* bad = R"(
record cfg = { n : uint256 }
global st : cfg
exception Nope
let public helper (x : uint256) : unit =
  guard (x > 0) Nope
let public f (x : uint256) : uint256 =
  st.n <- x;
  helper x;
  x
)";
    SourceModule m = parse_source(bad);
    CHECK(rule_of([&] { typecheck(m); }) == "raise-discipline");
}

TEST_CASE("global shape: ADT-typed fields are rejected") {
    const char* bad = R"(
type intlist = Nil | Cons int32 intlist
record holder = { l : intlist }
global st : holder
)";
    SourceModule m = parse_source(bad);
    std::string rule = rule_of([&] { typecheck(m); });
    CHECK((rule == "global-shape" || rule == "type"));

    const char* bad2 = R"(
type intlist = Nil | Cons int32 intlist
global st : intlist
)";
    SourceModule m2 = parse_source(bad2);
    CHECK(rule_of([&] { typecheck(m2); }) == "global-shape");
}

TEST_CASE("kind mismatches are rejected") {
    const char* bad = R"(
let private f (a : uint256) (b : uint32) : uint256 = a + b
)";
    SourceModule m = parse_source(bad);
    CHECK(rule_of([&] { typecheck(m); }) == "kind-match");

    const char* bad_lit = R"(
let private f (a : uint32) : uint32 = a + 0x100000000
)";
    SourceModule m2 = parse_source(bad_lit);
    CHECK(rule_of([&] { typecheck(m2); }) == "kind-match");
}

TEST_CASE("out-of-subset constructs are rejected with a named rule") {
    struct Case {
        const char* src;
        const char* expect_rule;
    };
    const Case cases[] = {
        // unknown type
        {"let private f (x : widget) : unit = ()", "unknown-type"},
        // signed division cannot be compiled
        {"let private f (a : int32) (b : int32) : int32 = a / b", "signed-division"},
        // add_gas with a non-constant argument
        {"let private f (x : uint256) : unit = add_gas x 0", "gas-annotation-constant"},
        // match must cover every constructor exactly once
        {"type t = A | B\nlet private f (x : t) : uint256 = match x with A -> 1 end",
         "match-exhaustive"},
        {"type t = A | B\nlet private f (x : t) : uint256 = match x with A -> 1 | A -> 2 | B -> 3 end",
         "match-exhaustive"},
        // calls and mutation do not belong in contracts
        {"let private g (x : uint256) : uint256 = x\n"
         "let private f (x : uint256) : uint256 requires { g x = 1 } = x",
         "spec-language"},
        // old outside a contract
        {"let private f (x : uint256) : uint256 = old x", "spec-language"},
        // bare map identifiers
        {"global m : map\nlet private f (x : uint256) : uint256 = m", "map-use"},
        // recursion requires the rec marker
        {"let private f (x : uint256) : uint256 = f x", "type"},
    };
    for (const Case& c : cases) {
        INFO(c.src);
        std::string rule = rule_of([&] {
            SourceModule m = parse_source(c.src);
            typecheck(m);
        });
        CHECK(rule == c.expect_rule);
    }
}

TEST_CASE("lowering produces administrative form that re-checks") {
    const char* src = R"(
type intlist = Nil | Cons int32 intlist
record cfg = { owner : uint256; open : bool }
global st : cfg
global balanceOf : map
exception OnlyOwner

let rec private len (l : intlist) : uint256
  variant { 0 }
=
  match l with
  | Nil -> 0
  | Cons _ r -> 1 + len r
  end

let public touch (a : uint256) : uint256 =
  guard (caller = st.owner) OnlyOwner;
  balanceOf[a] <- balanceOf[a] + 1;
  emit Touched a;
  let mut i = 0 in
  (while i < 3 do i := i + 1 done;
   if mem balanceOf a then balanceOf[a] else 0)
)";
    CoreModule core = compile_to_core(src);
    CHECK(core.fns.size() == 2);
    CHECK_NOTHROW(recheck_core(core));

    const CoreFn* len = core.find("len");
    REQUIRE(len != nullptr);
    CHECK(len->is_rec);
    CHECK(len->params.size() == 1);
    CHECK(!len->word_params());  // ADT parameter, not dispatchable

    const CoreFn* touch = core.find("touch");
    REQUIRE(touch != nullptr);
    CHECK(touch->word_params());
    CHECK(touch->n_slots > 1);
}

TEST_CASE("layout plan: slots in declaration order, disjoint map bases") {
    const char* src = R"(
record cfg = { owner : uint256; open : bool }
global st : cfg
global a : map
global b : map
global scalar : uint256
)";
    SourceModule m = parse_source(src);
    typecheck(m);
    LayoutPlan plan = plan_layout(m);
    CHECK(plan.slot_of("st", "owner") == U256(0));
    CHECK(plan.slot_of("st", "open") == U256(1));
    CHECK(plan.slot_of("scalar", "") == U256(2));
    CHECK(plan.map_base.at("a") == U256(1).shl(201));
    CHECK(plan.map_base.at("b") == U256(2).shl(201));
    // presence and value slots interleave and never collide across maps
    U256 va = LayoutPlan::map_value_slot(plan.map_base.at("a"), U256(7));
    U256 pa = LayoutPlan::map_presence_slot(plan.map_base.at("a"), U256(7));
    CHECK(va != pa);
    CHECK(U256::sub(pa, va) == U256(1));
}
