#pragma once

namespace gskin {

// Coarse body-part tags used to gate correspondence searches. LowerBody is a
// garment-side tag for pieces that drape over pelvis and both legs.
enum PartTag : int {
  kTorso = 0,
  kLeftLeg = 1,
  kRightLeg = 2,
  kLeftArm = 3,
  kRightArm = 4,
  kPelvis = 5,
  kLowerBody = 6,
};

inline bool parts_compatible(int a, int b) {
  if (a == b) return true;
  auto pair = [&](int x, int y) { return (a == x && b == y) || (a == y && b == x); };
  if (pair(kLowerBody, kPelvis)) return true;
  if (pair(kLowerBody, kLeftLeg)) return true;
  if (pair(kLowerBody, kRightLeg)) return true;
  if (pair(kTorso, kPelvis)) return true;
  return false;
}

}  // namespace gskin
