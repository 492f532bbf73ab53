#include "banditlab/patchmodel/enumerate.hpp"

namespace banditlab::patchmodel {

using minilang::ClassDecl;
using minilang::Object;
using minilang::Program;
using minilang::ScopeEntry;
using minilang::Value;

namespace {

// class of a non-null object binding, nullptr otherwise
const ClassDecl* object_class(const Program& prog, const Value& v) {
    if (!v.is_object()) return nullptr;
    return prog.find_class(v.as_object()->class_name);
}

// the declared class a Return* strategy may build/borrow, nullptr if the
// enclosing function returns a builtin or nothing
const ClassDecl* return_class(const ActivationSite& site) {
    if (site.enclosing == nullptr || !site.enclosing->return_type) return nullptr;
    return site.program->find_class(*site.enclosing->return_type);
}

const ScopeEntry* find_entry(const ActivationSite& site, std::string_view name) {
    for (const auto& e : site.scope)
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace

std::vector<Decision> enumerate_decisions(const ActivationSite& site) {
    const Program& prog = *site.program;
    std::vector<Decision> out;

    for (const auto& entry : site.scope) {
        const ClassDecl* cls = object_class(prog, entry.value);
        if (cls != nullptr && cls->declares_member(site.member))
            out.push_back({Strategy::ReplaceReuse, entry.name, 0});
    }
    for (const auto& cls : prog.classes)
        if (cls.declares_member(site.member))
            out.push_back({Strategy::ReplaceNew, cls.name, 0});

    out.push_back({Strategy::SkipLine, "", 0});
    out.push_back({Strategy::ReturnNull, "", 0});

    if (const ClassDecl* ret = return_class(site)) {
        out.push_back({Strategy::ReturnNew, ret->name, 0});
        for (const auto& entry : site.scope)
            if (entry.value.is_object() && entry.value.as_object()->class_name == ret->name)
                out.push_back({Strategy::ReturnVar, entry.name, 0});
    }

    for (size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<uint32_t>(i);
    return out;
}

std::optional<Continuation> apply_decision(const ActivationSite& site, const Decision& d) {
    const Program& prog = *site.program;
    switch (d.strategy) {
    case Strategy::ReplaceReuse: {
        const ScopeEntry* entry = find_entry(site, d.payload);
        if (entry == nullptr) return std::nullopt;
        const ClassDecl* cls = object_class(prog, entry->value);
        if (cls == nullptr || !cls->declares_member(site.member)) return std::nullopt;
        return Continuation{Continuation::Kind::SubstituteReceiver, entry->value};
    }
    case Strategy::ReplaceNew: {
        const ClassDecl* cls = prog.find_class(d.payload);
        if (cls == nullptr || !cls->declares_member(site.member)) return std::nullopt;
        return Continuation{Continuation::Kind::SubstituteReceiver,
                            default_construct(prog, d.payload)};
    }
    case Strategy::SkipLine:
        return Continuation{Continuation::Kind::SkipStatement, Value::null()};
    case Strategy::ReturnNull:
        return Continuation{Continuation::Kind::ReturnFromFrame, Value::null()};
    case Strategy::ReturnNew: {
        const ClassDecl* ret = return_class(site);
        if (ret == nullptr || ret->name != d.payload) return std::nullopt;
        return Continuation{Continuation::Kind::ReturnFromFrame,
                            default_construct(prog, d.payload)};
    }
    case Strategy::ReturnVar: {
        const ClassDecl* ret = return_class(site);
        const ScopeEntry* entry = find_entry(site, d.payload);
        if (ret == nullptr || entry == nullptr) return std::nullopt;
        if (!entry->value.is_object() ||
            entry->value.as_object()->class_name != ret->name)
            return std::nullopt;
        return Continuation{Continuation::Kind::ReturnFromFrame, entry->value};
    }
    }
    return std::nullopt;
}

Value default_construct(const Program& program, std::string_view class_name) {
    const ClassDecl* cls = program.find_class(class_name);
    auto obj = std::make_shared<Object>();
    obj->class_name = std::string(class_name);
    for (const auto& f : cls->fields) {
        Value init;
        if (f.init) {
            if (const auto* i = std::get_if<int64_t>(&*f.init))
                init = Value::of_int(*i);
            else if (const auto* b = std::get_if<bool>(&*f.init))
                init = Value::of_bool(*b);
            else if (const auto* s = std::get_if<std::string>(&*f.init))
                init = Value::of_str(*s);
        }
        obj->fields.emplace_back(f.name, std::move(init));
    }
    return Value::of_object(std::move(obj));
}

}  // namespace banditlab::patchmodel
