(* one step, then stop *)
vars run : bool, x.
init run.
trans run and !run' and x' = x or !run and !run' and x' = x.
final !run.
