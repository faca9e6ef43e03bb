(* while (x > 0) x = x - y *)
vars x, y.
const y.
trans x > 0 and x' = x - y or x <= 0 and x' = x.
final x <= 0.
