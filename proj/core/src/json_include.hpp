#pragma once

#if defined(L2R_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif
