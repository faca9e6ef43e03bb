(* doubleSquare(bool h, int x): z = h ? 2*x : x; while (z > 0) { z--; y += x; }
   the final doubling for !h is applied in the post-relation *)
vars x, y, z, h : bool.
const x, h.
init y = 0 and (h and z = 2 * x or !h and z = x).
trans z > 0 and z' = z - 1 and y' = y + x or z <= 0 and z' = z and y' = y.
final z <= 0.
