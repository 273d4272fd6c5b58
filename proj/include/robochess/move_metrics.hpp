#pragma once

#include <string_view>

namespace robochess {

// MR1 handles the white pieces, MR2 the black ones.
enum class ArmId { MR1, MR2 };

inline std::string_view to_string(ArmId arm) { return arm == ArmId::MR1 ? "MR1" : "MR2"; }

struct MoveMetrics {
    double duration = 0;     // s
    double path_length = 0;  // m, gripper polyline
    ArmId arm_id = ArmId::MR1;
    int move_index = 0;      // index within this arm's stream
    int half_move = 0;       // global half-move index

    friend bool operator==(const MoveMetrics&, const MoveMetrics&) = default;
};

}  // namespace robochess
