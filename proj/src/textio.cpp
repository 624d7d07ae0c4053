// placeholder, filled in by the textio module
