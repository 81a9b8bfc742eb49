#pragma once

#include <map>
#include <string>

#include "c2o/observer.hpp"

namespace c2o {

enum class EmitTarget { Osl, Json, MatlabCompatible };

// Deterministic: identical programs yield byte-identical output.
std::string emit(const ObserverProgram& p, EmitTarget target);

// Inverse of emit(·, Osl) / emit(·, Json) on their images.
ObserverProgram parse_osl(const std::string& text);
ObserverProgram parse_osl_json(const std::string& text);

// Source name -> valid MATLAB identifier; injective over a program's names.
std::map<std::string, std::string> matlab_identifier_map(const ObserverProgram& p);

} // namespace c2o
