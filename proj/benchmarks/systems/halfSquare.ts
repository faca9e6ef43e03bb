(* halfSquare(int h, int low): two loops counting i up to h, then to low *)
vars b : bool, h, low, i, y, v.
const h, low.
init low > h and h > 0 and b and i = 0 and y = 0 and v = 0.
trans b and h > i and b' and i' = i + 1 and y' = y + y and v' = v or
      b and h <= i and !b' and i' = i and y' = y and v' = 1 or
      !b and low > i and !b' and i' = i + 1 and y' = y + y and v' = v or
      !b and low <= i and !b' and i' = i and y' = y and v' = v.
final !b and low <= i.
