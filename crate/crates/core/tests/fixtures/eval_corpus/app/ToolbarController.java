package app;

import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.JButton;

public class ToolbarController implements ActionListener {
  private JButton newButton;
  private JButton openButton;
  private JButton saveButton;

  @Override
  public void actionPerformed(ActionEvent e) {
    Object source = e.getSource();
    if (source == newButton) {
      createDocument();
    } else if (source == openButton) {
      openDocument();
    } else if (source == saveButton) {
      saveDocument();
    }
  }

  private void createDocument() { }
  private void openDocument() { }
  private void saveDocument() { }
}
