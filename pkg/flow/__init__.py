"""Flow variants, the time stepper and the rescaling between them."""
