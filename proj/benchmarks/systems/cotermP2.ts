(* while (x > 0) x = x - 2 * y *)
vars x, y.
const y.
trans x > 0 and x' = x - 2 * y or x <= 0 and x' = x.
final x <= 0.
