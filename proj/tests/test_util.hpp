// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "skyground/annotation.hpp"
#include "skyground/error.hpp"
#include "skyground/vehicle_table.hpp"

namespace testutil {

template <class F>
std::optional<skyground::Errc> error_code(F&& f) {
    try {
        f();
    } catch (const skyground::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline skyground::vehicles::VehicleTable bundled_table() {
    return skyground::vehicles::load_table(std::string(SKYGROUND_DATA_DIR) + "/vehicles.csv");
}

// Nadir 4000x3000 camera at 50 m.
inline skyground::geometry::CameraModel nadir_camera(double agl = 50.0) {
    return {6.7e-3, 2.4e-6, 4000, 3000, skyground::geometry::deg_to_rad(90.0), agl};
}

}  // namespace testutil

#define CHECK_ERRC(expr, code) CHECK(testutil::error_code([&] { (void)(expr); }) == (code))
