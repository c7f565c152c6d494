#pragma once

#include <vector>

namespace asep {

struct Knot {
  double u;
  double value;
};

// A linear piece of a profile on [x0, x1) running from d0 to d1.
struct ProfilePiece {
  double x0;
  double x1;
  double d0;
  double d1;
};

// Piecewise-linear density with constant tails. Two knots may share a position to encode a jump;
// evaluation is right-continuous.
class Profile {
 public:
  Profile(std::vector<Knot> knots, double leftTail, double rightTail);
  static Profile constant(double value);

  double operator()(double u) const;
  double left_limit(double u) const;

  const std::vector<Knot>& knots() const { return knots_; }
  double left_tail() const { return leftTail_; }
  double right_tail() const { return rightTail_; }
  double first_knot() const;
  double last_knot() const;

  // Linear pieces clipped to [a, b], including constant tail pieces.
  std::vector<ProfilePiece> pieces(double a, double b) const;
  double integral(double a, double b) const;

 private:
  std::vector<Knot> knots_;
  double leftTail_;
  double rightTail_;
};

// max(profile, floor) with knots inserted where a linear piece crosses the floor.
Profile floored(const Profile& profile, double floor);

}  // namespace asep
