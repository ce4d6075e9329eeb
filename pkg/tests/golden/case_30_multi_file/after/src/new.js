// brand new
function arrive() { return 1; }
