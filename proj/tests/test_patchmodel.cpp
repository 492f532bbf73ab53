#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "banditlab/minilang/interpreter.hpp"
#include "banditlab/minilang/parser.hpp"
#include "banditlab/patchmodel/decision.hpp"
#include "banditlab/patchmodel/enumerate.hpp"
#include "support/oracle.hpp"
#include "support/providers.hpp"

using namespace banditlab::patchmodel;
using banditlab::minilang::DecisionPointId;
using banditlab::minilang::ScriptProvider;
using banditlab::minilang::NoneProvider;
using banditlab::minilang::execute;
using testsupport::RecordingProvider;
using testsupport::SeenActivation;

namespace {

// first activation of a laps executed without any repairs
SeenActivation first_activation(const banditlab::minilang::Program& prog) {
    NoneProvider none;
    RecordingProvider rec(none);
    execute(prog, "main", rec);
    REQUIRE(!rec.seen.empty());
    return rec.seen.front();
}

std::string render(const std::vector<Decision>& decisions) {
    std::string out;
    for (const auto& d : decisions) {
        if (!out.empty()) out += " | ";
        out += decision_to_string(d);
    }
    return out;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
    const Strategy all[] = {Strategy::ReplaceReuse, Strategy::ReplaceNew,
                            Strategy::SkipLine,     Strategy::ReturnNull,
                            Strategy::ReturnNew,    Strategy::ReturnVar};
    for (Strategy s : all) {
        auto back = strategy_from_name(strategy_name(s));
        REQUIRE(back.has_value());
        CHECK(*back == s);
    }
    CHECK(!strategy_from_name("Retry").has_value());
    CHECK(strategy_name(Strategy::ReplaceReuse) == "ReplaceReuse");
    CHECK(strategy_name(Strategy::ReturnVar) == "ReturnVar");
}

TEST_CASE("decision text omits the colon for empty payloads") {
    CHECK(decision_to_string({Strategy::SkipLine, "", 0}) == "SkipLine");
    CHECK(decision_to_string({Strategy::ReturnNull, "", 7}) == "ReturnNull");
    CHECK(decision_to_string({Strategy::ReplaceNew, "Date", 0}) == "ReplaceNew:Date");

    auto d = decision_from_string("ReplaceNew:Date");
    REQUIRE(d.has_value());
    CHECK(d->strategy == Strategy::ReplaceNew);
    CHECK(d->payload == "Date");
    CHECK(decision_from_string("SkipLine")->payload.empty());
    CHECK(!decision_from_string("ReplaceNew:").has_value());
    CHECK(!decision_from_string("Bogus").has_value());
    CHECK(!decision_from_string("").has_value());
}

TEST_CASE("decision identity ignores the enumeration index") {
    Decision a{Strategy::SkipLine, "", 0};
    Decision b{Strategy::SkipLine, "", 5};
    CHECK(a == b);
    CHECK(Decision{Strategy::ReplaceReuse, "zz", 0} <
          Decision{Strategy::ReplaceNew, "aa", 0});
    CHECK(Decision{Strategy::ReplaceNew, "aa", 0} <
          Decision{Strategy::ReplaceNew, "ab", 0});
}

TEST_CASE("sequence steps round-trip through text") {
    auto p = DecisionPointId::from_string("render/0/1");
    REQUIRE(p.has_value());
    SequenceStep s{*p, {Strategy::ReplaceNew, "Date", 2}};
    CHECK(step_to_string(s) == "ReplaceNew:Date@render/0/1");
    auto back = step_from_string("ReplaceNew:Date@render/0/1");
    REQUIRE(back.has_value());
    CHECK(*back == s);

    CHECK(!step_from_string("ReplaceNew:Date").has_value());
    CHECK(!step_from_string("Bogus@render/0/1").has_value());
    CHECK(!step_from_string("SkipLine@nonsense").has_value());

    DecisionSequence seq{s, {*p, {Strategy::SkipLine, "", 1}}};
    CHECK(sequence_to_string(seq) == "ReplaceNew:Date@render/0/1 ; SkipLine@render/0/1");
    CHECK(sequence_to_string({}).empty());
}

TEST_CASE("enumeration at the session failure point follows canonical order") {
    auto prog = testsupport::load_fixture("session.mls");
    auto act = first_activation(prog);
    CHECK(act.site.point.to_string() == "getLastConnectionDate/1/0");
    CHECK(render(act.enumeration) ==
          "ReplaceNew:Session | SkipLine | ReturnNull | ReturnNew:Date");
    for (size_t i = 0; i < act.enumeration.size(); ++i)
        CHECK(act.enumeration[i].index == i);
}

TEST_CASE("enumeration lists reuse candidates in scope order") {
    auto prog = testsupport::load_fixture("coll360.mls");
    auto act = first_activation(prog);
    CHECK(act.site.member == "label");
    CHECK(render(act.enumeration) ==
          "ReplaceReuse:spare | ReplaceNew:Item | SkipLine | ReturnNull");
}

TEST_CASE("a wide scope produces the full strategy spread") {
    auto prog = testsupport::load_fixture("math988b.mls");
    auto act = first_activation(prog);
    REQUIRE(act.enumeration.size() == 32);
    CHECK(decision_to_string(act.enumeration[0]) == "ReplaceReuse:a1");
    CHECK(decision_to_string(act.enumeration[1]) == "ReplaceReuse:a2");
    CHECK(decision_to_string(act.enumeration[13]) == "ReplaceReuse:a14");
    CHECK(decision_to_string(act.enumeration[14]) == "ReplaceNew:Item");
    CHECK(decision_to_string(act.enumeration[15]) == "SkipLine");
    CHECK(decision_to_string(act.enumeration[16]) == "ReturnNull");
    CHECK(decision_to_string(act.enumeration[17]) == "ReturnNew:Item");
    CHECK(decision_to_string(act.enumeration[18]) == "ReturnVar:a1");
    CHECK(decision_to_string(act.enumeration[31]) == "ReturnVar:a14");
}

TEST_CASE("new-instance candidates follow class declaration order") {
    auto prog = testsupport::load_fixture("lang587.mls");
    auto act = first_activation(prog);
    CHECK(render(act.enumeration) ==
          "ReplaceReuse:da | ReplaceReuse:db | ReplaceReuse:dc | "
          "ReplaceNew:ThemeA | ReplaceNew:ThemeB | ReplaceNew:ThemeC | "
          "SkipLine | ReturnNull | ReturnNew:Report | ReturnVar:rep");
}

TEST_CASE("enumeration invariants hold at every reachable activation") {
    for (const char* name : {"session.mls", "coll360.mls", "math369.mls",
                             "math988a.mls", "math1115.mls"}) {
        CAPTURE(name);
        auto prog = testsupport::load_fixture(name);
        auto oracle = testsupport::oracle_enumerate(prog);
        for (const auto& [seq, ok] : oracle.sequences) {
            ScriptProvider script(seq);
            RecordingProvider rec(script);
            execute(prog, "main", rec);
            for (const auto& act : rec.seen) {
                const auto& site = act.site;
                REQUIRE(!act.enumeration.empty());
                std::set<std::string> texts;
                int skips = 0, nulls = 0;
                for (size_t i = 0; i < act.enumeration.size(); ++i) {
                    const Decision& d = act.enumeration[i];
                    CHECK(d.index == i);
                    if (i) CHECK(act.enumeration[i - 1].strategy <= d.strategy);
                    texts.insert(decision_to_string(d));
                    switch (d.strategy) {
                    case Strategy::SkipLine:
                        ++skips;
                        CHECK(d.payload.empty());
                        break;
                    case Strategy::ReturnNull:
                        ++nulls;
                        CHECK(d.payload.empty());
                        break;
                    case Strategy::ReplaceReuse: {
                        bool found = false;
                        for (const auto& e : site.scope)
                            if (e.name == d.payload) {
                                found = true;
                                REQUIRE(e.value.is_object());
                                const auto* cls = site.program->find_class(
                                    e.value.as_object()->class_name);
                                REQUIRE(cls != nullptr);
                                CHECK(cls->declares_member(site.member));
                            }
                        CHECK(found);
                        break;
                    }
                    case Strategy::ReplaceNew: {
                        const auto* cls = site.program->find_class(d.payload);
                        REQUIRE(cls != nullptr);
                        CHECK(cls->declares_member(site.member));
                        break;
                    }
                    case Strategy::ReturnNew:
                        REQUIRE(site.enclosing->return_type.has_value());
                        CHECK(d.payload == *site.enclosing->return_type);
                        break;
                    case Strategy::ReturnVar: {
                        REQUIRE(site.enclosing->return_type.has_value());
                        bool found = false;
                        for (const auto& e : site.scope)
                            if (e.name == d.payload) {
                                found = true;
                                REQUIRE(e.value.is_object());
                                CHECK(e.value.as_object()->class_name ==
                                      *site.enclosing->return_type);
                            }
                        CHECK(found);
                        break;
                    }
                    }
                }
                CHECK(skips == 1);
                CHECK(nulls == 1);
                // pairwise distinct by (strategy, payload)
                CHECK(texts.size() == act.enumeration.size());
            }
        }
    }
}

TEST_CASE("apply_decision validates payloads against the live site") {
    auto prog = testsupport::load_fixture("coll360.mls");
    auto act = first_activation(prog);
    const auto& site = act.site;

    auto reuse = apply_decision(site, {Strategy::ReplaceReuse, "spare", 0});
    REQUIRE(reuse.has_value());
    CHECK(reuse->kind == Continuation::Kind::SubstituteReceiver);
    CHECK(reuse->value.as_object() == site.scope[1].value.as_object());

    CHECK(!apply_decision(site, {Strategy::ReplaceReuse, "item", 0}).has_value());
    CHECK(!apply_decision(site, {Strategy::ReplaceReuse, "ghost", 0}).has_value());
    CHECK(!apply_decision(site, {Strategy::ReplaceReuse, "sink", 0}).has_value());

    auto fresh = apply_decision(site, {Strategy::ReplaceNew, "Item", 0});
    REQUIRE(fresh.has_value());
    CHECK(fresh->kind == Continuation::Kind::SubstituteReceiver);
    REQUIRE(fresh->value.is_object());
    CHECK(fresh->value.as_object() != site.scope[1].value.as_object());
    CHECK(fresh->value.as_object()->find_field("label")->as_str() == "x");
    CHECK(!apply_decision(site, {Strategy::ReplaceNew, "Sink", 0}).has_value());

    auto skip = apply_decision(site, {Strategy::SkipLine, "", 0});
    REQUIRE(skip.has_value());
    CHECK(skip->kind == Continuation::Kind::SkipStatement);

    auto ret = apply_decision(site, {Strategy::ReturnNull, "", 0});
    REQUIRE(ret.has_value());
    CHECK(ret->kind == Continuation::Kind::ReturnFromFrame);
    CHECK(ret->value.is_null());

    // firstUse declares no return type: value-returning unwinds are out
    CHECK(!apply_decision(site, {Strategy::ReturnNew, "Item", 0}).has_value());
    CHECK(!apply_decision(site, {Strategy::ReturnVar, "spare", 0}).has_value());
}

TEST_CASE("return strategies respect the enclosing return type") {
    auto prog = testsupport::load_fixture("session.mls");
    auto act = first_activation(prog);

    auto fresh = apply_decision(act.site, {Strategy::ReturnNew, "Date", 0});
    REQUIRE(fresh.has_value());
    CHECK(fresh->kind == Continuation::Kind::ReturnFromFrame);
    CHECK(fresh->value.as_object()->class_name == "Date");

    CHECK(!apply_decision(act.site, {Strategy::ReturnNew, "Session", 0}).has_value());
    CHECK(!apply_decision(act.site, {Strategy::ReturnVar, "session", 0}).has_value());
}

TEST_CASE("returning a variable hands back the very same object") {
    auto prog = testsupport::load_fixture("math988b.mls");
    auto act = first_activation(prog);
    const auto& site = act.site;

    auto ret = apply_decision(site, {Strategy::ReturnVar, "a3", 0});
    REQUIRE(ret.has_value());
    CHECK(ret->kind == Continuation::Kind::ReturnFromFrame);
    const banditlab::minilang::Value* a3 = nullptr;
    for (const auto& e : site.scope)
        if (e.name == "a3") a3 = &e.value;
    REQUIRE(a3 != nullptr);
    CHECK(ret->value.as_object() == a3->as_object());
}

TEST_CASE("default construction honours declared field initializers") {
    auto prog = banditlab::minilang::parse_program(R"(
class Other { var z: Int = 0; }
class Mixed {
    var n: Int = -5;
    var s: Str = "hi";
    var b: Bool = true;
    var bare: Int;
    var link: Other;
}
fn main() { }
)", "inline");
    auto v = default_construct(prog, "Mixed");
    REQUIRE(v.is_object());
    const auto& obj = *v.as_object();
    CHECK(obj.class_name == "Mixed");
    REQUIRE(obj.fields.size() == 5);
    CHECK(obj.fields[0].first == "n");
    CHECK(obj.fields[0].second.as_int() == -5);
    CHECK(obj.fields[1].second.as_str() == "hi");
    CHECK(obj.fields[2].second.as_bool() == true);
    CHECK(obj.fields[3].second.is_null());
    CHECK(obj.fields[4].second.is_null());
}
