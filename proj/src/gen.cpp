// placeholder, filled in by the gen module
