(* squaresSum(int a, int b) with a*a replaced by a *)
vars a, b, c.
const b.
init 0 < a and a < b and c = 0.
trans a < b and c' = c + a and a' = a + 1 or a >= b and c' = c and a' = a.
final a >= b.
