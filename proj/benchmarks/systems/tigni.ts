(* high: x = star; return x >= low ? x : low.  !high: x = low; while (star) x++.
   The integer choice happens before the first step and is part of the
   pre-relation; the loop choice is angelic with two successors. *)
vars b : bool, x, high : bool, low.
const high, low.
trans high and b and (x >= low and !b' and x' = x or x < low and !b' and x' = low) or
      !high and b and (b' and x' = x + 1 or !b' and x' = x) or
      !b and !b' and x' = x.
final !b.
successors 2.
angelic_trans
      high and b and (x >= low and !b' and x' = x and !b'' and x'' = x or
                      x < low and !b' and x' = low and !b'' and x'' = low) or
      !high and b and b' and x' = x + 1 and !b'' and x'' = x or
      !b and !b' and x' = x and !b'' and x'' = x.
