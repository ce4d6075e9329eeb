@@ %% ~~ ]] )) !!
function ok() { return 1; }
function extra() { return 2; }
