#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "banditlab/minilang/interpreter.hpp"
#include "banditlab/minilang/lexer.hpp"
#include "banditlab/minilang/parser.hpp"
#include "support/oracle.hpp"
#include "support/providers.hpp"

using namespace banditlab::minilang;
using banditlab::patchmodel::Decision;
using banditlab::patchmodel::DecisionSequence;
using banditlab::patchmodel::SequenceStep;
using banditlab::patchmodel::Strategy;

namespace {

DecisionPointId pid(const std::string& text) {
    auto id = DecisionPointId::from_string(text);
    REQUIRE(id.has_value());
    return *id;
}

SequenceStep step(const std::string& point, Strategy s, std::string payload = "") {
    return {pid(point), Decision{s, std::move(payload), 0}};
}

ExecResult run_scripted(const Program& prog, DecisionSequence script,
                        uint64_t budget = kDefaultStepBudget) {
    ScriptProvider provider(std::move(script));
    return execute(prog, "main", provider, budget);
}

ExecResult run_none(const Program& prog, uint64_t budget = kDefaultStepBudget) {
    NoneProvider provider;
    return execute(prog, "main", provider, budget);
}

Program parse(const std::string& source) { return parse_program(source, "inline"); }

}  // namespace

TEST_CASE("lexer produces the expected token stream") {
    auto toks = lex("fn main() -> Int { var x: Int = 1 + 2; }");
    std::vector<TokKind> kinds;
    for (const auto& t : toks) kinds.push_back(t.kind);
    CHECK(kinds == std::vector<TokKind>{
                       TokKind::KwFn, TokKind::Ident, TokKind::LParen, TokKind::RParen,
                       TokKind::Arrow, TokKind::Ident, TokKind::LBrace, TokKind::KwVar,
                       TokKind::Ident, TokKind::Colon, TokKind::Ident, TokKind::Assign,
                       TokKind::IntLit, TokKind::Plus, TokKind::IntLit, TokKind::Semi,
                       TokKind::RBrace, TokKind::End});
    CHECK(toks[1].text == "main");
    CHECK(toks[12].int_value == 1);
    CHECK(toks[14].int_value == 2);
}

TEST_CASE("lexer handles strings, comments, and multi-char operators") {
    auto toks = lex("\"a\\n\\\"b\\\"\" // trailing comment\n== != && || !");
    REQUIRE(toks.size() == 7);  // including End
    CHECK(toks[0].kind == TokKind::StrLit);
    CHECK(toks[0].text == "a\n\"b\"");
    CHECK(toks[1].kind == TokKind::Eq);
    CHECK(toks[2].kind == TokKind::Ne);
    CHECK(toks[3].kind == TokKind::AndAnd);
    CHECK(toks[4].kind == TokKind::OrOr);
    CHECK(toks[5].kind == TokKind::Bang);
    CHECK(toks[1].loc.line == 2);
}

TEST_CASE("lexer rejects malformed input") {
    CHECK_THROWS_AS(lex("var x = 1 & 2;"), ParseError);
    CHECK_THROWS_AS(lex("\"unterminated"), ParseError);
}

TEST_CASE("parser reports malformed syntax with a location") {
    try {
        parse("fn f( {");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.loc.line == 1);
    }
}

TEST_CASE("parser rejects ill-formed programs") {
    // duplicate declarations
    CHECK_THROWS_AS(parse("class A { } class A { } fn main() { }"), ParseError);
    CHECK_THROWS_AS(parse("fn f() { } fn f() { } fn main() { }"), ParseError);
    CHECK_THROWS_AS(parse("class A { var x: Int = 1; fn x() { } } fn main() { }"),
                    ParseError);
    CHECK_THROWS_AS(parse("fn f(a: Int, a: Int) { } fn main() { }"), ParseError);
    // shadowing in any nested block
    CHECK_THROWS_AS(parse("fn f(a: Int) { var a: Int = 1; } fn main() { }"), ParseError);
    CHECK_THROWS_AS(
        parse("fn main() { var x: Int = 1; if (true) { var x: Int = 2; } }"),
        ParseError);
    // `this` is reserved
    CHECK_THROWS_AS(parse("fn f(this: Int) { } fn main() { }"), ParseError);
    CHECK_THROWS_AS(parse("fn main() { var this: Int = 1; }"), ParseError);
    // unresolved names
    CHECK_THROWS_AS(parse("fn main() { var x: Widget = null; }"), ParseError);
    CHECK_THROWS_AS(parse("fn main() { nope(); }"), ParseError);
    CHECK_THROWS_AS(parse("fn main() { var x: Int = 1; x = new Widget(); }"),
                    ParseError);
    // assignment target must be a variable or a field
    CHECK_THROWS_AS(parse("fn main() { 1 + 2 = 3; }"), ParseError);

    // sibling blocks may reuse a name
    CHECK_NOTHROW(parse(
        "fn main() { if (true) { var t: Int = 1; } else { var t: Int = 2; } }"));
}

TEST_CASE("decision point ids round-trip through text") {
    DecisionPointId id;
    id.function = "Html.write";
    id.stmt_path = {2, 0, 1};
    id.expr_index = 3;
    CHECK(id.to_string() == "Html.write/2.0.1/3");
    auto back = DecisionPointId::from_string("Html.write/2.0.1/3");
    REQUIRE(back.has_value());
    CHECK(*back == id);

    CHECK(!DecisionPointId::from_string("").has_value());
    CHECK(!DecisionPointId::from_string("f").has_value());
    CHECK(!DecisionPointId::from_string("f/0").has_value());
    CHECK(!DecisionPointId::from_string("f/x/0").has_value());
    CHECK(!DecisionPointId::from_string("f//0").has_value());
}

TEST_CASE("static dereference sites are enumerated in declaration order") {
    auto prog = testsupport::load_fixture("session.mls");
    auto sites = prog.decision_sites();
    REQUIRE(sites.size() == 7);
    auto at = [&](size_t i) { return sites[i].first.to_string(); };
    CHECK(at(0) == "Session.getLastConnection/0/0");
    CHECK(at(1) == "Html.write/0/0");
    CHECK(at(2) == "Html.write/0/1");
    CHECK(at(3) == "getLastConnectionDate/1/0");
    CHECK(at(4) == "render/0/0");
    CHECK(at(5) == "render/0/1");
    CHECK(at(6) == "main/2/0");
    CHECK(sites[0].second == "lastConnection");
    CHECK(sites[3].second == "getLastConnection");
    CHECK(sites[5].second == "toString");
}

TEST_CASE("statement paths descend into if, else, and while blocks") {
    auto prog = parse(R"(
class C { var f: Int = 1; }
fn main() {
    var c: C = null;
    var i: Int = 0;
    if (i == 0) {
        var x: Int = c.f;
    } else {
        var y: Int = c.f;
    }
    while (i < 1) {
        i = i + c.f;
    }
}
)");
    auto sites = prog.decision_sites();
    REQUIRE(sites.size() == 3);
    CHECK(sites[0].first.to_string() == "main/2.0.0/0");
    CHECK(sites[1].first.to_string() == "main/2.1.0/0");
    CHECK(sites[2].first.to_string() == "main/3.0.0/0");
}

TEST_CASE("interpreter evaluates arithmetic, strings, and logic") {
    auto prog = parse(R"(
fn main() {
    assert(1 + 2 * 3 == 7);
    assert((0 - 7) / 2 == 0 - 3);
    assert(10 / 3 == 3);
    assert("n=" + 5 == "n=5");
    assert("b:" + true == "b:false" == false);
    assert(2 < 3 && 3 > 2);
    assert(!(1 == "1"));
    assert(!(true == 1));
    assert(null == null);
    assert((false && (1 / 0 == 0)) == false);
    assert(true || (1 / 0 == 0));
}
)");
    auto r = run_none(prog);
    CHECK(r.outcome.kind == LapsOutcome::Kind::Success);
    CHECK(r.trace.steps > 0);
}

TEST_CASE("objects compare by identity and carry field defaults") {
    auto prog = parse(R"(
class P { var v: Int = 3; var tag: Str = "p"; var next: P; var ok: Bool = true; }
fn main() {
    var a: P = new P();
    var b: P = new P();
    var c: P = a;
    assert(a == c);
    assert(a != b);
    assert(a.v == 3);
    assert(a.tag == "p");
    assert(a.next == null);
    assert(a.ok);
    a.v = 9;
    assert(c.v == 9);
    assert(b.v == 3);
}
)");
    CHECK(run_none(prog).outcome.kind == LapsOutcome::Kind::Success);
}

TEST_CASE("control flow: while loops and falling off a function end") {
    auto prog = parse(R"(
fn noop() { }
fn sum_to(n: Int) -> Int {
    var total: Int = 0;
    var i: Int = 1;
    while (i < n + 1) {
        total = total + i;
        i = i + 1;
    }
    return total;
}
fn main() {
    assert(sum_to(4) == 10);
    assert(sum_to(0) == 0);
    assert(noop() == null);
}
)");
    CHECK(run_none(prog).outcome.kind == LapsOutcome::Kind::Success);
}

TEST_CASE("method calls bind this and mutate shared state") {
    auto prog = parse(R"(
class Counter {
    var n: Int = 0;
    fn bump(by: Int) -> Int {
        this.n = this.n + by;
        return this.n;
    }
}
fn main() {
    var c: Counter = new Counter();
    assert(c.bump(2) == 2);
    assert(c.bump(3) == 5);
    assert(c.n == 5);
}
)");
    CHECK(run_none(prog).outcome.kind == LapsOutcome::Kind::Success);
}

TEST_CASE("runtime faults carry their kind") {
    auto fault = [&](const std::string& body) {
        auto r = run_none(parse("fn main() { " + body + " }"));
        REQUIRE(r.outcome.kind == LapsOutcome::Kind::RuntimeError);
        return r.outcome.error;
    };
    CHECK(fault("var x: Int = 1 / 0;") == RuntimeErrorKind::DivisionByZero);
    CHECK(fault("var x: Int = 1 + null;") == RuntimeErrorKind::TypeError);
    CHECK(fault("var x: Str = \"a\" - \"b\";") == RuntimeErrorKind::TypeError);
    CHECK(fault("if (1) { }") == RuntimeErrorKind::TypeError);
    CHECK(fault("var x: Bool = !3;") == RuntimeErrorKind::TypeError);
    CHECK(fault("var x: Int = 1; var y: Int = x.field;") == RuntimeErrorKind::TypeError);
    CHECK(fault("assert(3);") == RuntimeErrorKind::TypeError);
}

TEST_CASE("missing members and arity mismatches surface at runtime") {
    auto prog = parse(R"(
class A { var x: Int = 1; fn m(v: Int) -> Int { return v; } }
fn f(a: Int) -> Int { return a; }
fn main() {
    var a: A = new A();
    var y: Int = a.zz;
}
)");
    auto r = run_none(prog);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::RuntimeError);
    CHECK(r.outcome.error == RuntimeErrorKind::MissingMember);

    auto prog2 = parse(R"(
class A { fn m(v: Int) -> Int { return v; } }
fn main() { var a: A = new A(); var y: Int = a.m(); }
)");
    auto r2 = run_none(prog2);
    REQUIRE(r2.outcome.kind == LapsOutcome::Kind::RuntimeError);
    CHECK(r2.outcome.error == RuntimeErrorKind::TypeError);

    auto prog3 = parse("fn f(a: Int) -> Int { return a; } fn main() { f(1, 2); }");
    auto r3 = run_none(prog3);
    REQUIRE(r3.outcome.kind == LapsOutcome::Kind::RuntimeError);
    CHECK(r3.outcome.error == RuntimeErrorKind::TypeError);
}

TEST_CASE("failed asserts report the failing line") {
    auto prog = parse("fn main() {\n    assert(true);\n    assert(1 == 2);\n}");
    auto r = run_none(prog);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::OracleFailed);
    CHECK(r.outcome.loc.line == 3);
}

TEST_CASE("step budget and call depth are both bounded") {
    auto spin = parse("fn main() { while (true) { } }");
    auto r = run_none(spin, 200);
    CHECK(r.outcome.kind == LapsOutcome::Kind::StepBudgetExceeded);

    auto recurse = parse("fn f() -> Int { return f(); } fn main() { f(); }");
    auto r2 = run_none(recurse);
    CHECK(r2.outcome.kind == LapsOutcome::Kind::StepBudgetExceeded);
}

TEST_CASE("execution is deterministic") {
    auto prog = testsupport::load_fixture("session.mls");
    auto a = run_none(prog);
    auto b = run_none(prog);
    CHECK(a.trace.steps == b.trace.steps);
    CHECK(a.trace.activated == b.trace.activated);
    CHECK(a.outcome.to_string() == b.outcome.to_string());
}

TEST_CASE("the entry function must exist and take no parameters") {
    auto prog = parse("fn main(x: Int) { } fn other() { }");
    NoneProvider none;
    CHECK_THROWS_AS(execute(prog, "missing", none), FixtureError);
    CHECK_THROWS_AS(execute(prog, "main", none), FixtureError);
    CHECK_NOTHROW(execute(prog, "other", none));
}

TEST_CASE("a declined activation surfaces as an unrepaired null") {
    auto prog = testsupport::load_fixture("session.mls");
    auto r = run_none(prog);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::UnrepairedNull);
    REQUIRE(r.outcome.point.has_value());
    CHECK(r.outcome.point->to_string() == "getLastConnectionDate/1/0");
    REQUIRE(r.trace.activated.size() == 1);
    CHECK(r.trace.activated[0] == *r.outcome.point);
    CHECK(r.trace.taken.empty());
}

TEST_CASE("scripted decisions steer a laps to every outcome") {
    auto prog = testsupport::load_fixture("session.mls");
    const std::string npe1 = "getLastConnectionDate/1/0";
    const std::string npe2 = "render/0/1";

    // one decision repairs the laps outright
    auto ok = run_scripted(prog, {step(npe1, Strategy::ReturnNew, "Date")});
    CHECK(ok.outcome.kind == LapsOutcome::Kind::Success);
    CHECK(ok.trace.taken.size() == 1);

    // cascading repair: every first-point choice that survives needs the second
    for (auto first : {step(npe1, Strategy::ReplaceNew, "Session"),
                       step(npe1, Strategy::SkipLine),
                       step(npe1, Strategy::ReturnNull)}) {
        auto r = run_scripted(prog, {first, step(npe2, Strategy::ReplaceNew, "Date")});
        CHECK(r.outcome.kind == LapsOutcome::Kind::Success);
        REQUIRE(r.trace.activated.size() == 2);
        CHECK(r.trace.activated[1].to_string() == npe2);
    }

    // a repair that silences the write loses the page content
    auto failed = run_scripted(prog, {step(npe1, Strategy::ReturnNull),
                                      step(npe2, Strategy::SkipLine)});
    CHECK(failed.outcome.kind == LapsOutcome::Kind::OracleFailed);
    CHECK(failed.trace.taken.size() == 2);

    // running dry asks for more decisions at the pending point
    auto dry = run_scripted(prog, {step(npe1, Strategy::SkipLine)});
    REQUIRE(dry.outcome.kind == LapsOutcome::Kind::NeedsMoreDecisions);
    CHECK(dry.outcome.point->to_string() == npe2);
}

TEST_CASE("script provider exposes the pending enumeration when it runs dry") {
    auto prog = testsupport::load_fixture("session.mls");
    ScriptProvider provider({});
    auto r = execute(prog, "main", provider);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::NeedsMoreDecisions);
    CHECK(provider.consumed() == 0);
    REQUIRE(provider.pending_point().has_value());
    CHECK(provider.pending_point()->to_string() == "getLastConnectionDate/1/0");
    REQUIRE(provider.pending_enumeration().size() == 4);
    CHECK(provider.pending_enumeration()[0].strategy == Strategy::ReplaceNew);
    CHECK(provider.pending_enumeration()[0].payload == "Session");
}

TEST_CASE("a script naming the wrong point is a replay bug") {
    auto prog = testsupport::load_fixture("session.mls");
    ScriptProvider provider({step("render/0/0", Strategy::SkipLine)});
    CHECK_THROWS_AS(execute(prog, "main", provider), ReplayMismatchError);
}

TEST_CASE("trailing script steps go unused") {
    auto prog = testsupport::load_fixture("session.mls");
    auto r = run_scripted(prog, {step("getLastConnectionDate/1/0", Strategy::ReturnNew, "Date"),
                                 step("render/0/1", Strategy::SkipLine)});
    CHECK(r.outcome.kind == LapsOutcome::Kind::Success);
    CHECK(r.trace.taken.size() == 1);
}

TEST_CASE("a null method receiver activates before its arguments run") {
    auto prog = parse(R"(
class Sink {
    var count: Int = 0;
    fn push(n: Int) { this.count = this.count + n; }
}
fn main() {
    var s: Sink = null;
    s.push(1 / 0);
}
)");
    // declined: the null surfaces, the poisoned argument never evaluates
    auto r = run_none(prog);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::UnrepairedNull);
    CHECK(r.outcome.point->to_string() == "main/1/0");

    // skipping the statement also skips the argument
    auto skipped = run_scripted(prog, {step("main/1/0", Strategy::SkipLine)});
    CHECK(skipped.outcome.kind == LapsOutcome::Kind::Success);
}

TEST_CASE("a null field store target activates before the right-hand side") {
    auto prog = parse(R"(
class Box { var v: Int = 0; }
fn main() {
    var b: Box = null;
    b.v = 1 / 0;
}
)");
    auto r = run_none(prog);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::UnrepairedNull);
    CHECK(r.outcome.point->to_string() == "main/1/0");

    auto skipped = run_scripted(prog, {step("main/1/0", Strategy::SkipLine)});
    CHECK(skipped.outcome.kind == LapsOutcome::Kind::Success);
}

TEST_CASE("activation snapshots capture the frame scope") {
    auto session = testsupport::load_fixture("session.mls");
    NoneProvider none;
    testsupport::RecordingProvider rec(none);
    execute(session, "main", rec);
    REQUIRE(rec.seen.size() == 1);
    const auto& site = rec.seen[0].site;
    CHECK(site.member == "getLastConnection");
    REQUIRE(site.scope.size() == 1);
    CHECK(site.scope[0].name == "session");
    CHECK(site.scope[0].value.is_null());
    CHECK(site.scope[0].origin == VarOrigin::Local);
    REQUIRE(site.enclosing != nullptr);
    CHECK(site.enclosing->qualified_name == "getLastConnectionDate");

    auto coll = testsupport::load_fixture("coll360.mls");
    testsupport::RecordingProvider rec2(none);
    execute(coll, "main", rec2);
    REQUIRE(rec2.seen.size() == 1);
    const auto& scope = rec2.seen[0].site.scope;
    REQUIRE(scope.size() == 3);
    CHECK(scope[0].name == "item");
    CHECK(scope[0].value.is_null());
    CHECK(scope[0].origin == VarOrigin::Param);
    CHECK(scope[1].name == "spare");
    CHECK(scope[1].value.is_object());
    CHECK(scope[1].value.as_object()->class_name == "Item");
    CHECK(scope[2].name == "sink");
    CHECK(scope[2].value.as_object()->class_name == "Sink");
}

TEST_CASE("an activation inside a method sees this as the first binding") {
    auto prog = parse(R"(
class B { var x: Int = 1; }
class A {
    var b: B = null;
    fn go() -> Int { return this.b.x; }
}
fn main() {
    var a: A = new A();
    var r: Int = a.go();
}
)");
    NoneProvider none;
    testsupport::RecordingProvider rec(none);
    auto r = execute(prog, "main", rec);
    REQUIRE(r.outcome.kind == LapsOutcome::Kind::UnrepairedNull);
    CHECK(r.outcome.point->to_string() == "A.go/0/0");
    REQUIRE(rec.seen.size() == 1);
    const auto& scope = rec.seen[0].site.scope;
    REQUIRE(scope.size() == 1);
    CHECK(scope[0].name == "this");
    CHECK(scope[0].origin == VarOrigin::Param);
    CHECK(scope[0].value.as_object()->class_name == "A");
}

TEST_CASE("an activation with an empty frame yields an empty scope") {
    auto prog = parse(R"(
class A { fn m() -> Int { return 1; } }
fn g() -> A { return null; }
fn f() -> Int { return g().m(); }
fn main() { var r: Int = f(); }
)");
    NoneProvider none;
    testsupport::RecordingProvider rec(none);
    execute(prog, "main", rec);
    REQUIRE(rec.seen.size() == 1);
    CHECK(rec.seen[0].site.scope.empty());
    CHECK(rec.seen[0].site.point.to_string() == "f/0/0");
}
