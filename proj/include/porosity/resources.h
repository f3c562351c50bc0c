#pragma once

#include <string_view>

namespace porosity::resources {

// The 34 published sample records (CSV, exact dataset schema).
std::string_view sample_mixes_csv();

// Oxide composition of the reference cement and low-calcium fly ash (JSON).
std::string_view default_composition_json();

}  // namespace porosity::resources
