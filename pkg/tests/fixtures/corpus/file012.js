// widget helpers for panel 12
var counter12 = 0;
function updateCounter12(delta12) {
  counter12 = counter12 + delta12;
  return counter12;
}
var message12 = "counter12 ignored";
panel12.label = message12;
