#pragma once

#include <string>
#include <string_view>

#include "banditlab/minilang/ast.hpp"

namespace banditlab::minilang {

// Parses a whole program. source_name becomes Program::source_name and is the
// fixture id used in reports. Validates: unique class/function/member/param
// names, no variable shadowing within a function, and load-time resolution of
// class names (annotations, new) and free-call targets. Assigns decision point
// ids to every dereference-eligible site. Throws ParseError.
Program parse_program(std::string_view source, std::string source_name);

// Reads the file and parses it; the fixture id is the file stem.
Program load_program_file(const std::string& path);

}  // namespace banditlab::minilang
