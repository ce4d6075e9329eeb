// doomed file
const relic = 0;
function vanish() { return relic; }
