(* arrayInsert(int len, int h) with the array abstracted away *)
vars b : bool, len, h, i.
const h.
init b and i = 0.
trans b and i < len and i <> h and b' and len' = len and i' = i + 1 or
      b and (i >= len or i = h) and !b' and len' = len + 1 and i' = i or
      !b and i < len and !b' and len' = len and i' = i + 1 or
      !b and i >= len and !b' and len' = len and i' = i.
final !b and i >= len.
