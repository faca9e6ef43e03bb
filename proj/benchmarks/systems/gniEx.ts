(* gniEx(bool high, int low), after the initial choice of x:
   high: return x if x >= low, else diverge; !high: while (star) x++.
   b is the running flag; the angelic copy resolves the loop choice
   with two successors. *)
vars b : bool, x, h : bool, l.
const h, l.
trans b and h and (x >= l and !b' and x' = x or x < l and b' and x' = x) or
      b and !h and (b' and x' = x + 1 or !b' and x' = x) or
      !b and !b' and x' = x.
final !b.
successors 2.
angelic_trans
      b and h and (x >= l and !b' and x' = x and !b'' and x'' = x or
                   x < l and b' and x' = x and b'' and x'' = x) or
      b and !h and b' and x' = x + 1 and !b'' and x'' = x or
      !b and !b' and x' = x and !b'' and x'' = x.
