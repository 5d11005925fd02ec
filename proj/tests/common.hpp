#pragma once

#include <doctest.h>

#include "pfav/numfield.hpp"

inline const pfav::FieldRegistry& registry() {
  static const pfav::FieldRegistry reg = pfav::FieldRegistry::load_file(std::string(PFAV_CONFIG_DIR) + "/fields.conf");
  return reg;
}

inline const pfav::FieldDescriptor& field(const std::string& name) { return registry().get(name); }
