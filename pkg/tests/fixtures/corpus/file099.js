var edge = "unterminated
edge.mark();
