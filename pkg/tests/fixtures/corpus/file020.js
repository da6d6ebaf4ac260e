// widget helpers for panel 20
var counter20 = 0;
function updateCounter20(delta20) {
  counter20 = counter20 + delta20;
  return counter20;
}
var message20 = "counter20 ignored";
panel20.label = message20;
